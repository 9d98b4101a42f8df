#pragma once

#include <cstdint>
#include <vector>

namespace gbclab {

/// Halton sequence in `dims` dimensions with a Cranley-Patterson rotation
/// drawn from `seed`. seed 0 gives the unshifted sequence. Output is
/// identical on every platform.
std::vector<std::vector<double>> halton_points(int count, int dims, std::uint64_t seed);

/// Quasi-random points in r_inner <= |x| <= r_outer in R^n, uniform with
/// respect to volume.
std::vector<std::vector<double>> annulus_points(int count, int n, double r_inner, double r_outer,
                                                std::uint64_t seed);

}  // namespace gbclab
