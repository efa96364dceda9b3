#include "roe/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace roe {

namespace {

void require_shape(const SpacePtr& domain, const SpacePtr& codomain, const Matrix& m) {
  if (!domain || !codomain) throw Error(ErrorCode::InvalidParams, "operator needs both spaces");
  if (std::size_t(m.rows()) != codomain->size() || std::size_t(m.cols()) != domain->size()) {
    throw Error(ErrorCode::SpaceMismatch,
                "matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                    ", spaces need " + std::to_string(codomain->size()) + "x" +
                    std::to_string(domain->size()));
  }
  if (!m.allFinite()) throw Error(ErrorCode::NumericalFailure, "operator has non-finite entries");
}

void require_square(const LinearOperator& a, const char* what) {
  if (!a.same_space()) {
    throw Error(ErrorCode::SpaceMismatch, std::string(what) + " needs domain == codomain");
  }
}

}  // namespace

LinearOperator::LinearOperator(SpacePtr domain, SpacePtr codomain, Matrix entries)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), entries_(std::move(entries)) {
  require_shape(domain_, codomain_, entries_);
}

LinearOperator::LinearOperator(SpacePtr space, Matrix entries)
    : LinearOperator(space, space, std::move(entries)) {}

LinearOperator LinearOperator::identity(SpacePtr space) {
  const auto n = Eigen::Index(space->size());
  return LinearOperator(space, Matrix::Identity(n, n));
}

LinearOperator LinearOperator::zero(SpacePtr space) {
  const auto n = Eigen::Index(space->size());
  return LinearOperator(space, Matrix::Zero(n, n));
}

LinearOperator LinearOperator::adjoint() const {
  return LinearOperator(codomain_, domain_, entries_.adjoint());
}

LinearOperator operator*(const LinearOperator& a, const LinearOperator& b) {
  if (a.domain() != b.codomain()) {
    throw Error(ErrorCode::SpaceMismatch, "product a*b needs domain(a) == codomain(b)");
  }
  return LinearOperator(b.domain(), a.codomain(), a.matrix() * b.matrix());
}

LinearOperator indicator(SpacePtr space, const PointSet& set) {
  for (Index x : set) space->check_index(x);
  const auto n = Eigen::Index(space->size());
  Matrix m = Matrix::Zero(n, n);
  for (Index x : set) m(Eigen::Index(x), Eigen::Index(x)) = 1.0;
  return LinearOperator(std::move(space), std::move(m));
}

double propagation(const LinearOperator& a, double zero_tol) {
  require_square(a, "propagation");
  const auto& space = *a.domain();
  const auto& m = a.matrix();
  double best = 0.0;
  for (Eigen::Index x = 0; x < m.cols(); ++x) {
    for (Eigen::Index y = 0; y < m.rows(); ++y) {
      if (std::abs(m(y, x)) > zero_tol) best = std::max(best, space.dist(Index(y), Index(x)));
    }
  }
  return best;
}

QuasiLocalProfile quasi_local_profile(const LinearOperator& a, std::span<const double> radii,
                                      double zero_tol) {
  require_square(a, "quasi_local_profile");
  const auto& space = *a.domain();
  const auto& m = a.matrix();
  QuasiLocalProfile profile;
  for (double r : radii) {
    Matrix band = Matrix::Zero(m.rows(), m.cols());
    bool any = false;
    for (Eigen::Index x = 0; x < m.cols(); ++x) {
      for (Eigen::Index y = 0; y < m.rows(); ++y) {
        const double d = space.dist(Index(y), Index(x));
        // d >= r survives; the comparison matches the space's tolerance rule.
        const bool far = space.integral() ? d >= r : d >= r - kDistanceTol;
        if (far && std::abs(m(y, x)) > zero_tol) {
          band(y, x) = m(y, x);
          any = true;
        }
      }
    }
    profile.samples.emplace_back(r, any ? op_norm(band) : 0.0);
  }
  return profile;
}

Matrix submatrix(const Eigen::Ref<const Matrix>& m, const PointSet& rows, const PointSet& cols) {
  Matrix out(Eigen::Index(rows.size()), Eigen::Index(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out(Eigen::Index(i), Eigen::Index(j)) = m(Eigen::Index(rows[i]), Eigen::Index(cols[j]));
    }
  }
  return out;
}

double block_norm(const LinearOperator& a, const PointSet& rows, const PointSet& cols) {
  for (Index y : rows) a.codomain()->check_index(y);
  for (Index x : cols) a.domain()->check_index(x);
  if (rows.empty() || cols.empty()) return 0.0;
  return op_norm(submatrix(a.matrix(), rows, cols));
}

LinearOperator conditional_expectation(const LinearOperator& a) {
  require_square(a, "conditional_expectation");
  Matrix d = a.matrix().diagonal().asDiagonal();
  return LinearOperator(a.domain(), std::move(d));
}

OpNormStats op_norm_detailed(const Eigen::Ref<const Matrix>& a, int max_iterations,
                             double rel_tol) {
  OpNormStats stats;
  if (a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0) return stats;

  // The smaller Gram matrix carries the same nonzero spectrum.
  const Matrix gram = a.cols() <= a.rows() ? Matrix(a.adjoint() * a) : Matrix(a * a.adjoint());
  const Eigen::Index n = gram.rows();

  // All-ones start with a small index-dependent tilt so that it is not
  // orthogonal to the top eigenvector of symmetric-looking inputs.
  Eigen::VectorXcd v(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double tilt = std::fmod(0.6180339887498949 * double(k + 1), 1.0);
    v(k) = 1.0 + 0.25 * tilt;
  }
  v.normalize();

  for (int it = 1; it <= max_iterations; ++it) {
    Eigen::VectorXcd w = gram * v;
    const double theta = v.dot(w).real();
    const double residual = (w - theta * v).norm();
    stats.iterations = it;
    if (theta > 0.0 && residual <= rel_tol * theta) {
      stats.value = std::sqrt(theta);
      return stats;
    }
    const double wn = w.norm();
    if (wn == 0.0) break;
    v = w / wn;
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericalFailure,
                "power iteration stalled after " + std::to_string(max_iterations) +
                    " steps and the Hermitian eigensolver did not converge");
  }
  stats.used_fallback = true;
  stats.value = std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
  return stats;
}

double op_norm(const Eigen::Ref<const Matrix>& a) { return op_norm_detailed(a).value; }

std::size_t numerical_rank(const Eigen::Ref<const Matrix>& a, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidParams, "rank tolerance must be positive");
  if (a.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(a);
  if (svd.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "SVD failed");
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cut = tol * s(0);
  return std::size_t((s.array() > cut).count());
}

double unitarity_defect(const Eigen::Ref<const Matrix>& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  const auto n = u.rows();
  const Matrix id = Matrix::Identity(n, n);
  // Frobenius norm dominates the operator norm, so this never under-reports.
  return std::max((u.adjoint() * u - id).norm(), (u * u.adjoint() - id).norm());
}

}  // namespace roe
