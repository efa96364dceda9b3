#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "roe/iso.hpp"
#include "roe/space.hpp"

namespace roe::gen {

SpacePtr path(std::size_t n);
SpacePtr cycle(std::size_t n);
/// rows x cols grid graph with ids "r_c".
SpacePtr grid(std::size_t rows, std::size_t cols);
/// Complete `arity`-ary tree of the given depth (depth 0 is a single root).
SpacePtr tree(std::size_t arity, std::size_t depth);
/// Points uniform in the unit square joined when closer than `threshold`.
/// Throws InvalidParams if the sample is disconnected.
SpacePtr random_geometric(std::size_t n, double threshold, std::uint64_t seed);
/// Seeded random `degree`-regular graph (configuration model with restarts).
SpacePtr expander_sample(std::size_t n, std::size_t degree, std::uint64_t seed);

/// Dispatches on a generator name and numeric parameters, as given on the
/// command line. Throws InvalidParams.
SpacePtr by_name(const std::string& kind, const std::vector<double>& params,
                 std::optional<std::uint64_t> seed = std::nullopt);

/// Bijection built from seeded transpositions that keep every point within
/// `max_displacement` of its image.
CoarseMap random_bce(SpacePtr space, double max_displacement, std::uint64_t seed);

/// x -> D - x style reversal on the index order.
CoarseMap reversal(SpacePtr space);

/// The 8 symmetries of a square grid (4 for a non-square one), by index.
CoarseMap grid_symmetry(SpacePtr space, std::size_t rows, std::size_t cols, unsigned which);

/// Uniformly random unit-modulus phases.
std::vector<Complex> random_phases(std::size_t n, std::uint64_t seed);

/// max over x of d(x, f(x)) for a self-map.
double max_displacement(const CoarseMap& f);

}  // namespace roe::gen
