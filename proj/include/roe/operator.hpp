#pragma once

#include <complex>
#include <span>

#include <Eigen/Dense>

#include "roe/space.hpp"

namespace roe {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Default modulus below which an entry counts as zero for propagation.
inline constexpr double kZeroTol = 1e-12;

/// Complex matrix on l2 of finite spaces; entry (y, x) couples codomain point
/// y to domain point x.
class LinearOperator {
 public:
  LinearOperator(SpacePtr domain, SpacePtr codomain, Matrix entries);
  /// Square operator on one space.
  LinearOperator(SpacePtr space, Matrix entries);

  static LinearOperator identity(SpacePtr space);
  static LinearOperator zero(SpacePtr space);

  const SpacePtr& domain() const noexcept { return domain_; }
  const SpacePtr& codomain() const noexcept { return codomain_; }
  const Matrix& matrix() const noexcept { return entries_; }
  Complex operator()(Index y, Index x) const { return entries_(Eigen::Index(y), Eigen::Index(x)); }

  bool same_space() const noexcept { return domain_ == codomain_; }

  LinearOperator adjoint() const;

 private:
  SpacePtr domain_;
  SpacePtr codomain_;
  Matrix entries_;
};

/// Product a·b; b's codomain must be a's domain.
LinearOperator operator*(const LinearOperator& a, const LinearOperator& b);

/// chi_A: diagonal 0/1 projection onto A.
LinearOperator indicator(SpacePtr space, const PointSet& set);

/// Largest d(x, x') over entries with modulus above zero_tol.
double propagation(const LinearOperator& a, double zero_tol = kZeroTol);

struct QuasiLocalProfile {
  /// (r, norm of the far band d >= r) in ascending r.
  std::vector<std::pair<double, double>> samples;
};

/// Operator norm of the far-band truncation (entries with d(x,x') < r zeroed)
/// at each radius. Upper bound for sup ||chi_A a chi_B|| over d(A,B) >= r.
QuasiLocalProfile quasi_local_profile(const LinearOperator& a, std::span<const double> radii,
                                      double zero_tol = kZeroTol);

/// ||chi_A a chi_B||.
double block_norm(const LinearOperator& a, const PointSet& rows, const PointSet& cols);

/// Diagonal part of a.
LinearOperator conditional_expectation(const LinearOperator& a);

/// Largest singular value. Power iteration on the smaller Gram matrix with a
/// fixed start vector; falls back to a Hermitian eigensolver when it stalls.
double op_norm(const Eigen::Ref<const Matrix>& a);
inline double op_norm(const LinearOperator& a) { return op_norm(a.matrix()); }

struct OpNormStats {
  double value = 0.0;
  int iterations = 0;
  bool used_fallback = false;
};
OpNormStats op_norm_detailed(const Eigen::Ref<const Matrix>& a, int max_iterations = 10000,
                             double rel_tol = 1e-9);

/// Number of singular values above tol * sigma_max.
std::size_t numerical_rank(const Eigen::Ref<const Matrix>& a, double tol = 1e-9);
inline std::size_t numerical_rank(const LinearOperator& a, double tol = 1e-9) {
  return numerical_rank(a.matrix(), tol);
}

/// Frobenius-norm upper bound on max(||u*u - I||, ||uu* - I||).
double unitarity_defect(const Eigen::Ref<const Matrix>& u);

/// Rows `rows`, columns `cols` of m as a dense submatrix.
Matrix submatrix(const Eigen::Ref<const Matrix>& m, const PointSet& rows, const PointSet& cols);

}  // namespace roe
