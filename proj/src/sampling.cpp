#include "gbclab/sampling.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <random>

#include "gbclab/error.hpp"

namespace gbclab {

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(std::uint64_t i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

// 53-bit uniform in [0, 1) from raw engine output; std::uniform_real_distribution
// is not specified bit-for-bit across standard libraries.
double unit_from_bits(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<std::vector<double>> halton_points(int count, int dims, std::uint64_t seed) {
  if (dims < 1 || dims > static_cast<int>(std::size(kPrimes))) throw DimensionError("Halton dimension out of range");
  std::vector<double> shift(dims, 0.0);
  if (seed != 0) {
    std::mt19937_64 engine(seed);
    for (double& s : shift) s = unit_from_bits(engine());
  }
  std::vector<std::vector<double>> pts(count, std::vector<double>(dims));
  for (int k = 0; k < count; ++k)
    for (int d = 0; d < dims; ++d) {
      double v = radical_inverse(static_cast<std::uint64_t>(k) + 1, kPrimes[d]) + shift[d];
      pts[k][d] = v - std::floor(v);
    }
  return pts;
}

std::vector<std::vector<double>> annulus_points(int count, int n, double r_inner, double r_outer,
                                                std::uint64_t seed) {
  if (!(r_inner >= 0.0) || !(r_outer > r_inner)) throw Error("annulus needs 0 <= inner < outer");
  const auto raw = halton_points(count, n + 1, seed);
  const double a = std::pow(r_inner, n), b = std::pow(r_outer, n);
  std::vector<std::vector<double>> pts;
  pts.reserve(count);
  for (const auto& h : raw) {
    std::vector<double> x(n);
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      // Keep the argument of the inverse error function inside (-1, 1).
      const double t = std::clamp(h[i], 1e-12, 1.0 - 1e-12);
      x[i] = boost::math::erf_inv(2.0 * t - 1.0);
      norm2 += x[i] * x[i];
    }
    if (norm2 == 0.0) {
      x[0] = 1.0;
      norm2 = 1.0;
    }
    const double r = std::pow(a + h[n] * (b - a), 1.0 / n);
    const double scale = r / std::sqrt(norm2);
    for (double& c : x) c *= scale;
    pts.push_back(std::move(x));
  }
  return pts;
}

}  // namespace gbclab
