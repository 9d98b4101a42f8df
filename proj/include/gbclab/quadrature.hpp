#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "gbclab/parallel.hpp"

namespace gbclab {

/// Area of the unit sphere S^{n-1} in R^n: 2 pi^{n/2} / Gamma(n/2).
double sphere_area(int n);

/// One-dimensional Gauss rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss rule for the weight (1 - t^2)^lambda, lambda > -1 (Gegenbauer family).
/// lambda = 0 is Gauss-Legendre.
GaussRule gauss_gegenbauer(int count, double lambda);
GaussRule gauss_legendre(int count);

/// Product rule on S^{n-1} in hyperspherical angles.
struct QuadratureRule {
  int n = 0;
  int level = 0;
  int degree = 0;                 // exact for polynomials of this total degree
  std::vector<double> nodes;      // size() rows of n unit-vector coordinates
  std::vector<double> weights;    // sum to sphere_area(n)
  std::vector<double> angles;     // size() rows of n-1 chart coordinates

  std::size_t size() const noexcept { return weights.size(); }
  std::span<const double> node(std::size_t i) const {
    return {nodes.data() + i * n, static_cast<std::size_t>(n)};
  }
  std::span<const double> angle(std::size_t i) const {
    return {angles.data() + i * (n - 1), static_cast<std::size_t>(n - 1)};
  }
};

/// Polar angles use Gauss-Gegenbauer nodes in cos(theta) matched to their
/// sin^p(theta) area factor; the azimuth uses the midpoint trapezoid rule.
/// level L gives L+1 points per polar angle, 2(L+1) azimuthal points and
/// exactness degree 2L+1. All nodes lie strictly inside the angle box.
QuadratureRule sphere_rule(int n, int level);

/// u(theta) for theta_1..theta_{n-2} in (0, pi) and theta_{n-1} the azimuth.
std::vector<double> hyperspherical_point(std::span<const double> angles);
std::vector<double> hyperspherical_angles(std::span<const double> unit);
/// prod_{k=1}^{n-2} sin^{n-1-k}(theta_k), the area density of the chart.
double hyperspherical_density(std::span<const double> angles);

/// sum_i w_i field(u_i) with a fixed summation tree. A non-finite field value
/// raises DomainError naming the node.
double integrate_sphere(const QuadratureRule& rule, const std::function<double(std::span<const double>)>& field,
                        Execution exec = Execution::Parallel);

/// Plain-text node/weight table: a version line, "n level degree count", then
/// one row per node with n coordinates and the weight at full precision.
void write_rule(std::ostream& os, const QuadratureRule& rule);
QuadratureRule read_rule(std::istream& is);

}  // namespace gbclab
