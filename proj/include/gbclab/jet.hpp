#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace gbclab {

/// Truncated multivariate Taylor jet of order 3 in `vars()` variables.
///
/// Stores value, gradient, Hessian and third-derivative tensor as full dense
/// arrays. Every operation fills only the sorted index tuples (i <= j <= k)
/// and mirrors them, so symmetry is exact rather than approximate.
class Jet {
 public:
  Jet() = default;
  explicit Jet(int vars);

  static Jet constant(int vars, double value);
  /// The coordinate function t_index shifted to `value`.
  static Jet variable(int vars, int index, double value);

  int vars() const noexcept { return k_; }

  double value() const noexcept { return c_[0]; }
  double d1(int i) const noexcept { return c_[1 + i]; }
  double d2(int i, int j) const noexcept { return c_[off2() + i * k_ + j]; }
  double d3(int i, int j, int k) const noexcept { return c_[off3() + (i * k_ + j) * k_ + k]; }

  bool all_finite() const noexcept;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator-(Jet a) { return a *= -1.0; }
  friend Jet operator*(const Jet& a, const Jet& b);

  /// phi(u) where phi_derivs = (phi, phi', phi'', phi''') evaluated at u.value().
  friend Jet compose(const Jet& u, const std::array<double, 4>& phi_derivs);

 private:
  std::size_t off2() const noexcept { return 1 + static_cast<std::size_t>(k_); }
  std::size_t off3() const noexcept { return off2() + static_cast<std::size_t>(k_) * k_; }
  double& at2(int i, int j) noexcept { return c_[off2() + i * k_ + j]; }
  double& at3(int i, int j, int k) noexcept { return c_[off3() + (i * k_ + j) * k_ + k]; }
  void set2(int i, int j, double v) noexcept;
  void set3(int i, int j, int k, double v) noexcept;

  int k_ = 0;
  std::vector<double> c_;
};

// Elementary functions on jets. Each throws DomainError outside the smooth domain.
Jet jet_sin(const Jet& u);
Jet jet_cos(const Jet& u);
Jet jet_exp(const Jet& u);
Jet jet_log(const Jet& u);
Jet jet_sqrt(const Jet& u);
Jet jet_tanh(const Jet& u);
Jet jet_atan(const Jet& u);
Jet jet_reciprocal(const Jet& u);
Jet jet_divide(const Jet& a, const Jet& b);
/// u^c for a constant exponent; integer c admits negative bases.
Jet jet_pow(const Jet& u, double c);
/// u^v = exp(v log u) for a non-constant exponent; requires u > 0.
Jet jet_pow(const Jet& u, const Jet& v);

}  // namespace gbclab
