#include "gbclab/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "gbclab/error.hpp"

namespace gbclab {

double sphere_area(int n) { return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n); }

namespace {

// Monic recurrence coefficient b_k for the symmetric Jacobi weight (1-t^2)^lambda.
double recurrence_b(int k, double lambda) {
  const double a = 2.0 * k + 2.0 * lambda;
  return k * (k + 2.0 * lambda) / ((a - 1.0) * (a + 1.0));
}

}  // namespace

GaussRule gauss_gegenbauer(int count, double lambda) {
  if (count < 1) throw Error("Gauss rule needs at least one node");
  if (!(lambda > -1.0)) throw Error("Gegenbauer exponent must exceed -1");
  const double mu0 = std::sqrt(std::numbers::pi) * std::tgamma(lambda + 1.0) / std::tgamma(lambda + 1.5);

  // Golub-Welsch for starting values.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(count);
  Eigen::VectorXd off(std::max(count - 1, 0));
  for (int k = 1; k < count; ++k) off(k - 1) = std::sqrt(recurrence_b(k, lambda));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);

  GaussRule rule;
  rule.nodes.resize(count);
  rule.weights.resize(count);
  for (int i = 0; i < count; ++i) {
    double t = es.eigenvalues()(i);
    // Newton polish on the monic orthogonal polynomial p_count.
    for (int iter = 0; iter < 4; ++iter) {
      double p0 = 1.0, p1 = t, d0 = 0.0, d1 = 1.0;
      for (int k = 1; k < count; ++k) {
        const double b = recurrence_b(k, lambda);
        const double p2 = t * p1 - b * p0;
        const double d2 = p1 + t * d1 - b * d0;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
      }
      const double step = p1 / d1;
      t -= step;
      if (std::abs(step) < 1e-17) break;
    }
    // Christoffel weight: mu0 / sum_k p_k(t)^2 / ||p_k||^2.
    double p0 = 1.0, p1 = t, norm = 1.0;
    double christoffel = 1.0;
    for (int k = 1; k < count; ++k) {
      norm *= recurrence_b(k, lambda);
      christoffel += p1 * p1 / norm;
      const double p2 = t * p1 - recurrence_b(k, lambda) * p0;
      p0 = p1;
      p1 = p2;
    }
    rule.nodes[i] = t;
    rule.weights[i] = mu0 / christoffel;
  }
  // Enforce exact antisymmetry of nodes and symmetry of weights.
  for (int i = 0; i < count / 2; ++i) {
    const int j = count - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (count % 2 == 1) rule.nodes[count / 2] = 0.0;
  return rule;
}

GaussRule gauss_legendre(int count) { return gauss_gegenbauer(count, 0.0); }

std::vector<double> hyperspherical_point(std::span<const double> angles) {
  const int n = static_cast<int>(angles.size()) + 1;
  std::vector<double> u(n);
  double s = 1.0;
  for (int k = 0; k < n - 1; ++k) {
    u[k] = s * std::cos(angles[k]);
    s *= std::sin(angles[k]);
  }
  u[n - 1] = s;
  return u;
}

std::vector<double> hyperspherical_angles(std::span<const double> u) {
  const int n = static_cast<int>(u.size());
  std::vector<double> th(n - 1);
  for (int k = 0; k < n - 2; ++k) {
    double tail = 0.0;
    for (int j = k + 1; j < n; ++j) tail += u[j] * u[j];
    th[k] = std::atan2(std::sqrt(tail), u[k]);
  }
  double az = std::atan2(u[n - 1], u[n - 2]);
  if (az < 0.0) az += 2.0 * std::numbers::pi;
  th[n - 2] = az;
  return th;
}

double hyperspherical_density(std::span<const double> angles) {
  const int n = static_cast<int>(angles.size()) + 1;
  double d = 1.0;
  for (int k = 0; k < n - 2; ++k) d *= std::pow(std::sin(angles[k]), n - 2 - k);
  return d;
}

QuadratureRule sphere_rule(int n, int level) {
  if (n < 2) throw DimensionError("sphere rules need n >= 2");
  if (level < 1) throw Error("quadrature level must be at least 1");
  const int polar = level + 1;
  const int azimuth = 2 * (level + 1);

  // Polar angle k (0-based) carries sin^{n-2-k}; in t = cos(theta) that is
  // (1 - t^2)^{(n-3-k)/2} dt.
  std::vector<GaussRule> polar_rules;
  for (int k = 0; k < n - 2; ++k) polar_rules.push_back(gauss_gegenbauer(polar, 0.5 * (n - 3 - k)));

  QuadratureRule rule;
  rule.n = n;
  rule.level = level;
  rule.degree = 2 * level + 1;

  std::vector<int> idx(n - 2, 0);
  const double daz = 2.0 * std::numbers::pi / azimuth;
  for (;;) {
    double w = daz;
    std::vector<double> th(n - 1);
    for (int k = 0; k < n - 2; ++k) {
      th[k] = std::acos(polar_rules[k].nodes[idx[k]]);
      w *= polar_rules[k].weights[idx[k]];
    }
    for (int a = 0; a < azimuth; ++a) {
      th[n - 2] = (a + 0.5) * daz;
      const auto u = hyperspherical_point(th);
      rule.nodes.insert(rule.nodes.end(), u.begin(), u.end());
      rule.angles.insert(rule.angles.end(), th.begin(), th.end());
      rule.weights.push_back(w);
    }
    int k = n - 3;
    while (k >= 0 && ++idx[k] == polar) idx[k--] = 0;
    if (k < 0) break;
  }
  return rule;
}

double integrate_sphere(const QuadratureRule& rule, const std::function<double(std::span<const double>)>& field,
                        Execution exec) {
  const auto values = parallel::evaluate(
      rule.size(),
      [&](std::size_t i) {
        const double v = field(rule.node(i));
        if (!std::isfinite(v)) throw DomainError("non-finite field value at sphere node " + std::to_string(i));
        return rule.weights[i] * v;
      },
      exec);
  return parallel::pairwise_sum(values);
}

void write_rule(std::ostream& os, const QuadratureRule& rule) {
  os << "gbclab-sphere-rule 1\n";
  os << rule.n << ' ' << rule.level << ' ' << rule.degree << ' ' << rule.size() << '\n';
  os << std::setprecision(17);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    for (double c : rule.node(i)) os << c << ' ';
    os << rule.weights[i] << '\n';
  }
}

QuadratureRule read_rule(std::istream& is) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "gbclab-sphere-rule" || version != 1)
    throw Error("not a gbclab sphere rule table (version 1)");
  QuadratureRule rule;
  std::size_t count = 0;
  if (!(is >> rule.n >> rule.level >> rule.degree >> count) || rule.n < 2)
    throw Error("malformed sphere rule header");
  rule.nodes.resize(count * rule.n);
  rule.weights.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (int c = 0; c < rule.n; ++c)
      if (!(is >> rule.nodes[i * rule.n + c])) throw Error("truncated sphere rule table");
    if (!(is >> rule.weights[i])) throw Error("truncated sphere rule table");
    const auto th = hyperspherical_angles(rule.node(i));
    rule.angles.insert(rule.angles.end(), th.begin(), th.end());
  }
  return rule;
}

}  // namespace gbclab
