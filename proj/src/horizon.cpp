#include "gbclab/horizon.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "gbclab/error.hpp"
#include "gbclab/integration.hpp"

namespace gbclab {

HypersurfaceSpec parse_hypersurface(std::string_view rho_source, int n) {
  if (n < 2 || n > kMaxDim) throw DimensionError("hypersurface dimension out of range");
  HypersurfaceSpec spec;
  spec.n = n;
  spec.rho = parse_expression(rho_source, n, 'u');
  spec.source = std::string(rho_source);
  return spec;
}

double radius_at(const HypersurfaceSpec& spec, std::span<const double> u) {
  const double r = evaluate_value(*spec.rho, u);
  if (!std::isfinite(r) || !(r > 0.0)) throw DomainError("rho must be finite and positive, got " + std::to_string(r));
  return r;
}

FundamentalForms fundamental_forms(const HypersurfaceSpec& spec, std::span<const double> angles) {
  const int n = spec.n, d = n - 1;
  if (static_cast<int>(angles.size()) != d) throw DimensionError("chart point needs n-1 angles");

  // u(theta) as jets in the d angle variables.
  std::vector<Jet> u(n);
  Jet prod = Jet::constant(d, 1.0);
  for (int k = 0; k < d; ++k) {
    const Jet th = Jet::variable(d, k, angles[k]);
    u[k] = prod * jet_cos(th);
    prod = prod * jet_sin(th);
  }
  u[n - 1] = prod;
  const Jet rho = evaluate(*spec.rho, u);
  if (!(rho.value() > 0.0) || !rho.all_finite()) throw DomainError("rho must be finite and positive on the chart");

  Eigen::MatrixXd T(n, d);
  std::vector<Eigen::MatrixXd> hess(n, Eigen::MatrixXd(d, d));
  FundamentalForms f;
  f.point.resize(n);
  for (int i = 0; i < n; ++i) {
    const Jet X = rho * u[i];
    f.point[i] = X.value();
    for (int a = 0; a < d; ++a) {
      T(i, a) = X.d1(a);
      for (int b = 0; b < d; ++b) hess[i](a, b) = X.d2(a, b);
    }
  }
  const Eigen::MatrixXd I = T.transpose() * T;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(I, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success || !(es.eigenvalues()(0) > 1e-14 * es.eigenvalues()(d - 1)))
    throw DegenerateChart("first fundamental form is singular at this chart point");

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(T);
  Eigen::VectorXd N = qr.householderQ() * Eigen::VectorXd::Unit(n, n - 1);
  double xn = 0.0;
  for (int i = 0; i < n; ++i) xn += N(i) * f.point[i];
  if (xn < 0.0) N = -N;

  f.first = I;
  f.second = Matrix::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += hess[i](a, b) * N(i);
      f.second(a, b) = -s;
    }
  f.second = 0.5 * (f.second + f.second.transpose()).eval();
  f.normal.assign(N.data(), N.data() + n);
  f.area_density = std::sqrt(I.determinant());
  return f;
}

double elementary_symmetric(std::span<const double> values, int k) {
  std::vector<double> e(k + 1, 0.0);
  e[0] = 1.0;
  for (double v : values)
    for (int j = k; j >= 1; --j) e[j] += v * e[j - 1];
  return e[k];
}

SigmaCurvatures sigma_curvatures(const FundamentalForms& forms) {
  const Eigen::MatrixXd A = forms.second, B = forms.first;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw EigenFailure("principal curvature eigenproblem did not converge");
  SigmaCurvatures s;
  s.kappa.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  s.sigma1 = elementary_symmetric(s.kappa, 1);
  s.sigma2 = elementary_symmetric(s.kappa, 2);
  s.sigma3 = elementary_symmetric(s.kappa, 3);
  return s;
}

namespace {

void check_rule(const HypersurfaceSpec& spec, const QuadratureRule& rule) {
  if (rule.n != spec.n) throw DimensionError("quadrature rule dimension differs from the hypersurface's");
  if (rule.angles.size() != rule.size() * (rule.n - 1)) throw Error("quadrature rule carries no chart angles");
}

// Weight converting a sphere-rule weight to the hypersurface area element.
double area_factor(const QuadratureRule& rule, std::size_t i, const FundamentalForms& f) {
  return rule.weights[i] * f.area_density / hyperspherical_density(rule.angle(i));
}

}  // namespace

double integrate_surface(const HypersurfaceSpec& spec, const QuadratureRule& rule, const SurfaceField& field,
                         Execution exec) {
  check_rule(spec, rule);
  const auto values = parallel::evaluate(
      rule.size(),
      [&](std::size_t i) {
        const auto f = fundamental_forms(spec, rule.angle(i));
        const auto s = sigma_curvatures(f);
        const double v = field(f.point, f.normal, s);
        if (!std::isfinite(v)) throw DomainError("non-finite surface field at node " + std::to_string(i));
        return area_factor(rule, i, f) * v;
      },
      exec);
  return parallel::pairwise_sum(values);
}

double integrate_sigma(const HypersurfaceSpec& spec, int k, const QuadratureRule& rule, Execution exec) {
  if (k < 0 || k > spec.n - 1) throw Error("sigma index out of range");
  return integrate_surface(
      spec, rule,
      [k](std::span<const double>, std::span<const double>, const SigmaCurvatures& s) {
        return elementary_symmetric(s.kappa, k);
      },
      exec);
}

double area(const HypersurfaceSpec& spec, const QuadratureRule& rule, Execution exec) {
  return integrate_sigma(spec, 0, rule, exec);
}

namespace {

double af_rhs(double area_value, int n) {
  return 0.25 * std::pow(area_value / sphere_area(n), (n - 4.0) / (n - 1.0));
}

}  // namespace

AfCheck af_check(const HypersurfaceSpec& spec, const QuadratureRule& rule, Execution exec) {
  if (spec.n < 5) throw DimensionError("the Alexandrov-Fenchel check needs n >= 5");
  AfCheck c;
  c.lhs = 3.0 * gbc_constant(spec.n) * integrate_sigma(spec, 3, rule, exec);
  c.rhs = af_rhs(area(spec, rule, exec), spec.n);
  c.margin = c.lhs - c.rhs;
  return c;
}

PenroseBound penrose_rhs(std::span<const double> areas, int n, PenroseMode mode, double alpha) {
  if (areas.empty()) throw Error("penrose bound needs at least one area");
  if (mode == PenroseMode::Gbc && n < 5) throw DimensionError("the GBC Penrose bound needs n >= 5");
  if (mode == PenroseMode::Egb && n < 4) throw DimensionError("the EGB Penrose bound needs n >= 4");
  const double w = sphere_area(n);
  auto bound = [&](double a) {
    const double t = a / w;
    if (mode == PenroseMode::Gbc) return 0.25 * std::pow(t, (n - 4.0) / (n - 1.0));
    return 0.5 * std::pow(t, (n - 2.0) / (n - 1.0)) +
           0.5 * alpha * (n - 2.0) * (n - 3.0) * std::pow(t, (n - 4.0) / (n - 1.0));
  };
  PenroseBound b;
  double total = 0.0;
  for (double a : areas) {
    if (!(a > 0.0)) throw Error("component areas must be positive");
    total += a;
    b.per_component += bound(a);
  }
  b.combined = bound(total);
  return b;
}

namespace {

double s_ratio(const BoundaryS& s, std::span<const double> x) {
  if (!s.field) return 1.0;
  const double v = s.field(x);
  if (std::isinf(v) && v > 0.0) return 1.0;
  if (!(v >= 0.0)) throw DomainError("|Df|^2 on the boundary must be non-negative");
  return v / (1.0 + v);
}

}  // namespace

double boundary_term(const HypersurfaceSpec& spec, const QuadratureRule& rule, BoundaryMode mode, const BoundaryS& s,
                     double alpha, Execution exec) {
  const int n = spec.n;
  if (mode == BoundaryMode::Gbc) {
    if (n < 5) throw DimensionError("the GBC boundary term needs n >= 5");
    return 3.0 * gbc_constant(n) *
           integrate_surface(
               spec, rule,
               [&](std::span<const double> x, std::span<const double>, const SigmaCurvatures& k) {
                 const double q = s_ratio(s, x);
                 return q * q * k.sigma3;
               },
               exec);
  }
  if (n < 4) throw DimensionError("the EGB boundary term needs n >= 4");
  const double a = mode == BoundaryMode::P1 ? 0.0 : alpha;
  return integrate_surface(
             spec, rule,
             [&](std::span<const double> x, std::span<const double>, const SigmaCurvatures& k) {
               const double q = s_ratio(s, x);
               return q * k.sigma1 + 6.0 * a * q * q * k.sigma3;
             },
             exec) /
         (2.0 * (n - 1) * sphere_area(n));
}

double graph_mean_curvature(double H, double s) {
  if (std::isinf(s) && s > 0.0) return 0.0;
  return H / std::sqrt(1.0 + s);
}

HorizonReport horizon_report(const HypersurfaceSpec& spec, const QuadratureRule& rule, double alpha, Execution exec) {
  check_rule(spec, rule);
  constexpr std::size_t kWidth = 8;
  const auto rows = parallel::evaluate_rows(
      rule.size(), kWidth,
      [&](std::size_t i, std::span<double> out) {
        const auto f = fundamental_forms(spec, rule.angle(i));
        const auto s = sigma_curvatures(f);
        const double w = area_factor(rule, i, f);
        out[0] = w;
        out[1] = w * s.sigma1;
        out[2] = w * s.sigma2;
        out[3] = w * s.sigma3;
        out[4] = s.sigma1;
        out[5] = s.sigma2;
        out[6] = s.sigma3;
        out[7] = s.kappa.front();
      },
      exec);
  HorizonReport r;
  r.n = spec.n;
  r.level = rule.level;
  r.alpha = alpha;
  r.area = parallel::pairwise_sum(parallel::column(rows, kWidth, 0));
  r.int_sigma1 = parallel::pairwise_sum(parallel::column(rows, kWidth, 1));
  r.int_sigma2 = parallel::pairwise_sum(parallel::column(rows, kWidth, 2));
  r.int_sigma3 = parallel::pairwise_sum(parallel::column(rows, kWidth, 3));
  auto col_min = [&](std::size_t c) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rule.size(); ++i) m = std::min(m, rows[i * kWidth + c]);
    return m;
  };
  r.min_sigma1 = col_min(4);
  r.min_sigma2 = col_min(5);
  r.min_sigma3 = col_min(6);
  r.min_kappa = col_min(7);
  r.three_convex = r.min_sigma1 > 0.0 && r.min_sigma2 > 0.0 && r.min_sigma3 > 0.0;
  const int n = spec.n;
  const double w = sphere_area(n);
  const double area_value = r.area;
  if (n >= 5) {
    AfCheck c;
    c.lhs = 3.0 * gbc_constant(n) * r.int_sigma3;
    c.rhs = af_rhs(area_value, n);
    c.margin = c.lhs - c.rhs;
    r.af = c;
    r.penrose_gbc = penrose_rhs(std::span<const double>(&area_value, 1), n, PenroseMode::Gbc).combined;
    r.boundary_gbc = c.lhs;
  }
  if (n >= 4) {
    r.penrose_egb = penrose_rhs(std::span<const double>(&area_value, 1), n, PenroseMode::Egb, alpha).combined;
    r.boundary_egb = (r.int_sigma1 + 6.0 * alpha * r.int_sigma3) / (2.0 * (n - 1) * w);
  }
  return r;
}

}  // namespace gbclab
