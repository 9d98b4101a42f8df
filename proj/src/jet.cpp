#include "gbclab/jet.hpp"

#include <cmath>
#include <string>

#include "gbclab/error.hpp"

namespace gbclab {

Jet::Jet(int vars) : k_(vars), c_(1 + vars + vars * vars + vars * vars * vars, 0.0) {}

Jet Jet::constant(int vars, double value) {
  Jet j(vars);
  j.c_[0] = value;
  return j;
}

Jet Jet::variable(int vars, int index, double value) {
  Jet j(vars);
  j.c_[0] = value;
  j.c_[1 + index] = 1.0;
  return j;
}

bool Jet::all_finite() const noexcept {
  for (double v : c_)
    if (!std::isfinite(v)) return false;
  return true;
}

void Jet::set2(int i, int j, double v) noexcept {
  at2(i, j) = v;
  at2(j, i) = v;
}

void Jet::set3(int i, int j, int k, double v) noexcept {
  at3(i, j, k) = v;
  at3(i, k, j) = v;
  at3(j, i, k) = v;
  at3(j, k, i) = v;
  at3(k, i, j) = v;
  at3(k, j, i) = v;
}

Jet& Jet::operator+=(const Jet& o) {
  for (std::size_t t = 0; t < c_.size(); ++t) c_[t] += o.c_[t];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  for (std::size_t t = 0; t < c_.size(); ++t) c_[t] -= o.c_[t];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  const int n = a.k_;
  Jet r(n);
  const double a0 = a.value(), b0 = b.value();
  r.c_[0] = a0 * b0;
  for (int i = 0; i < n; ++i) r.c_[1 + i] = a.d1(i) * b0 + a0 * b.d1(i);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      r.set2(i, j, a.d2(i, j) * b0 + a.d1(i) * b.d1(j) + a.d1(j) * b.d1(i) + a0 * b.d2(i, j));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k) {
        const double v = a.d3(i, j, k) * b0 + a.d2(i, j) * b.d1(k) + a.d2(i, k) * b.d1(j) +
                         a.d2(j, k) * b.d1(i) + a.d1(i) * b.d2(j, k) + a.d1(j) * b.d2(i, k) +
                         a.d1(k) * b.d2(i, j) + a0 * b.d3(i, j, k);
        r.set3(i, j, k, v);
      }
  return r;
}

Jet compose(const Jet& u, const std::array<double, 4>& phi) {
  const int n = u.k_;
  Jet r(n);
  r.c_[0] = phi[0];
  for (int i = 0; i < n; ++i) r.c_[1 + i] = phi[1] * u.d1(i);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) r.set2(i, j, phi[2] * u.d1(i) * u.d1(j) + phi[1] * u.d2(i, j));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k) {
        const double v =
            phi[3] * u.d1(i) * u.d1(j) * u.d1(k) +
            phi[2] * (u.d2(i, j) * u.d1(k) + u.d2(i, k) * u.d1(j) + u.d2(j, k) * u.d1(i)) +
            phi[1] * u.d3(i, j, k);
        r.set3(i, j, k, v);
      }
  return r;
}

namespace {

void require(bool ok, const char* fn, double t) {
  if (!ok) throw DomainError(std::string(fn) + " is not smooth at argument " + std::to_string(t));
}

}  // namespace

Jet jet_sin(const Jet& u) {
  const double s = std::sin(u.value()), c = std::cos(u.value());
  return compose(u, {s, c, -s, -c});
}

Jet jet_cos(const Jet& u) {
  const double s = std::sin(u.value()), c = std::cos(u.value());
  return compose(u, {c, -s, -c, s});
}

Jet jet_exp(const Jet& u) {
  const double e = std::exp(u.value());
  require(std::isfinite(e), "exp", u.value());
  return compose(u, {e, e, e, e});
}

Jet jet_log(const Jet& u) {
  const double t = u.value();
  require(t > 0.0, "log", t);
  const double inv = 1.0 / t;
  return compose(u, {std::log(t), inv, -inv * inv, 2.0 * inv * inv * inv});
}

Jet jet_sqrt(const Jet& u) {
  const double t = u.value();
  require(t > 0.0, "sqrt", t);
  const double s = std::sqrt(t);
  return compose(u, {s, 0.5 / s, -0.25 / (s * t), 0.375 / (s * t * t)});
}

Jet jet_tanh(const Jet& u) {
  const double th = std::tanh(u.value());
  const double s = 1.0 - th * th;
  return compose(u, {th, s, -2.0 * th * s, -2.0 * s * (1.0 - 3.0 * th * th)});
}

Jet jet_atan(const Jet& u) {
  const double t = u.value();
  const double q = 1.0 / (1.0 + t * t);
  return compose(u, {std::atan(t), q, -2.0 * t * q * q, (6.0 * t * t - 2.0) * q * q * q});
}

Jet jet_reciprocal(const Jet& u) {
  const double t = u.value();
  require(t != 0.0, "division", t);
  const double inv = 1.0 / t;
  return compose(u, {inv, -inv * inv, 2.0 * inv * inv * inv, -6.0 * inv * inv * inv * inv});
}

Jet jet_divide(const Jet& a, const Jet& b) { return a * jet_reciprocal(b); }

Jet jet_pow(const Jet& u, double c) {
  const double t = u.value();
  const bool integer = std::nearbyint(c) == c;
  require(integer || t >= 0.0, "power", t);
  std::array<double, 4> phi{};
  double falling = 1.0;
  for (int k = 0; k < 4; ++k) {
    if (falling == 0.0) {
      phi[k] = 0.0;
    } else {
      const double e = c - k;
      require(!(t == 0.0 && e < 0.0), "power", t);
      phi[k] = falling * std::pow(t, e);
    }
    falling *= (c - k);
  }
  return compose(u, phi);
}

Jet jet_pow(const Jet& u, const Jet& v) { return jet_exp(v * jet_log(u)); }

}  // namespace gbclab
