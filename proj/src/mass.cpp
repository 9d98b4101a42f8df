#include "gbclab/mass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gbclab/error.hpp"
#include "gbclab/geometry.hpp"
#include "gbclab/sampling.hpp"

namespace gbclab {

namespace {

void check_dimensions(const MapSpec& map, MassSelector which, const QuadratureRule& rule) {
  if (rule.n != map.n) throw DimensionError("quadrature rule dimension differs from the map's");
  if (which.kind == MassKind::P2 && map.n < 5) throw DimensionError("the GBC mass needs n >= 5");
  if (which.kind == MassKind::Egb && map.n < 4) throw DimensionError("the EGB mass needs n >= 4");
  if (map.n < 3) throw DimensionError("mass computations need n >= 3");
}

// Least-squares slope of log y against log x.
double log_log_slope(const std::vector<std::pair<double, double>>& xy) {
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : xy) {
    mx += std::log(x);
    my += std::log(y);
  }
  mx /= xy.size();
  my /= xy.size();
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : xy) {
    sxx += (std::log(x) - mx) * (std::log(x) - mx);
    sxy += (std::log(x) - mx) * (std::log(y) - my);
  }
  return sxy / sxx;
}

}  // namespace

MassReport mass_surface(const MapSpec& map, MassSelector which, std::span<const double> radii,
                        const QuadratureRule& rule, Execution exec) {
  check_dimensions(map, which, rule);
  MassReport r;
  r.which = which;
  r.n = map.n;
  r.m = map.m;
  r.quadrature_level = rule.level;
  std::vector<double> values;
  for (double R : radii) {
    values.push_back(surface_flux(map, which, R, rule, exec));
    r.per_radius.emplace_back(R, values.back());
  }
  r.fit = extrapolate(radii, values);
  r.limit = r.fit->limit;
  return r;
}

BulkResult mass_bulk(const MapSpec& map, MassSelector which, double r0, double Rmax, const QuadratureRule& rule,
                     const VolumeOptions& opts) {
  check_dimensions(map, which, rule);
  const VolumeIntegral vol = shell_volume_integral(map, which, r0, Rmax, rule, opts);
  const double c = bulk_constant(which, map.n);
  const TailEstimate tail = tail_estimate(vol.shells);
  BulkResult b;
  b.truncated = c * vol.value;
  b.tail = c * tail.value;
  b.tail_exponent = tail.exponent;
  b.tail_reliable = tail.reliable;
  b.inner_radius = vol.shells.empty() ? r0 : vol.shells.front().inner;
  b.outer_radius = Rmax;
  b.shells = vol.shells;
  return b;
}

NormalBundleSample sample_normal_bundle(const MapSpec& map, const std::vector<std::vector<double>>& given,
                                        Execution exec) {
  const auto points = given.empty() ? annulus_points(64, map.n, 1.0, 4.0, 7) : given;
  NormalBundleSample s;
  s.points = static_cast<int>(points.size());
  constexpr std::size_t kWidth = 2;
  const auto rows = parallel::evaluate_rows(
      points.size(), kWidth,
      [&](std::size_t i, std::span<double> out) {
        const auto pg = geometry_at(map, points[i], {.normal_terms = false, .verify_paths = false});
        double rperp = 0.0, a2 = 0.0;
        for (const auto& R : pg.cd.Rperp) rperp += R.squaredNorm();
        for (const auto& A : pg.cd.A) a2 += A.squaredNorm();
        out[0] = std::sqrt(rperp) / (1.0 + a2);
        out[1] = pg.cd.L2;
      },
      exec);
  s.min_l2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    s.max_normal_ratio = std::max(s.max_normal_ratio, rows[i * kWidth]);
    s.min_l2 = std::min(s.min_l2, rows[i * kWidth + 1]);
  }
  s.flat = map.m == 1 || s.max_normal_ratio <= 1e-10;
  return s;
}

namespace {

BoundaryMode boundary_mode_for(MassSelector which) {
  switch (which.kind) {
    case MassKind::P2: return BoundaryMode::Gbc;
    case MassKind::P1: return BoundaryMode::P1;
    case MassKind::Egb: return BoundaryMode::Egb;
    case MassKind::AdmRaw: break;
  }
  throw Error("the raw ADM flux has no balance formula");
}

// Spread of f^a over the boundary nodes pushed out radially by the factor (1 + t).
std::pair<double, double> boundary_spread(const MapSpec& map, int a, const HypersurfaceSpec& sigma,
                                          const QuadratureRule& rule, double t) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const auto u = rule.node(i);
    const double rho = radius_at(sigma, u) * (1.0 + t);
    std::vector<double> x(u.begin(), u.end());
    for (double& c : x) c *= rho;
    const double v = evaluate_value(*map.exprs[a], x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {hi - lo, std::max(std::abs(lo), std::abs(hi))};
}

void check_constant_on_boundary(const MapSpec& map, const HypersurfaceSpec& sigma, const QuadratureRule& rule) {
  for (int a = 0; a < map.m; ++a) {
    const std::string name = "f^" + std::to_string(a + 1);
    try {
      const auto [spread, size] = boundary_spread(map, a, sigma, rule, 0.0);
      if (!(spread <= 1e-8 * (1.0 + size)))
        throw PreconditionError(name + " is not constant on the boundary hypersurface (spread " +
                                std::to_string(spread) + ")");
      continue;
    } catch (const DomainError&) {
      // f is not evaluable exactly on the boundary (typical for horizons):
      // the spread just outside must shrink toward zero.
    }
    double previous = std::numeric_limits<double>::infinity();
    for (double t : {1e-6, 1e-8, 1e-10}) {
      const auto [spread, size] = boundary_spread(map, a, sigma, rule, t);
      if (spread > 1e-8 * (1.0 + size) && !(spread < previous))
        throw PreconditionError(name + " does not approach a constant on the boundary hypersurface");
      previous = spread;
      if (t == 1e-10 && !(spread <= 1e-4 * (1.0 + size)))
        throw PreconditionError(name + " is not constant on the boundary hypersurface (spread " +
                                std::to_string(spread) + " just outside)");
    }
  }
}

BoundaryS boundary_s(const MapSpec& map, const ExteriorDomain& ext) {
  BoundaryS s;
  switch (ext.s_mode) {
    case BoundarySMode::Horizon: break;
    case BoundarySMode::FromMap:
      s.field = [&map](std::span<const double> x) {
        const auto jet = eval_jet3(map, x);
        double t = 0.0;
        for (int a = 0; a < map.m; ++a)
          for (int i = 0; i < map.n; ++i) t += jet.d1(a, i) * jet.d1(a, i);
        return t;
      };
      break;
    case BoundarySMode::Expression:
      if (!ext.s_expression) throw Error("boundary |Df|^2 expression missing");
      s.field = [expr = ext.s_expression](std::span<const double> x) {
        double r2 = 0.0;
        for (double c : x) r2 += c * c;
        std::vector<double> u(x.begin(), x.end());
        for (double& c : u) c /= std::sqrt(r2);
        return evaluate_value(*expr, u);
      };
      break;
  }
  return s;
}

}  // namespace

MassReport mass_balance(const MapSpec& map, MassSelector which, std::span<const double> radii,
                        const QuadratureRule& rule, const BalanceOptions& opts) {
  if (which.kind == MassKind::AdmRaw) throw Error("the raw ADM flux has no balance formula");
  if (radii.empty()) throw Error("balance needs at least one radius");
  MassReport report = mass_surface(map, which, radii, rule, opts.exec);
  report.radial_points = opts.radial_points;
  const double Rmax = radii.back();

  VolumeOptions vo;
  vo.radial_points = opts.radial_points;
  vo.core_radius = opts.core_radius;
  vo.exec = opts.exec;
  double cert_inner = std::max(opts.r0, 0.25);
  if (opts.exterior) {
    const auto& ext = *opts.exterior;
    if (ext.sigma.n != map.n) throw DimensionError("boundary hypersurface dimension differs from the map's");
    check_constant_on_boundary(map, ext.sigma, rule);
    vo.inner_radius = [&ext](std::span<const double> u) { return radius_at(ext.sigma, u); };
    double rho_max = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) rho_max = std::max(rho_max, radius_at(ext.sigma, rule.node(i)));
    cert_inner = 1.05 * rho_max;
  }
  report.bulk = mass_bulk(map, which, opts.r0, Rmax, rule, vo);
  if (!report.bulk->tail_reliable)
    report.warnings.push_back("bulk tail could not be fitted; the truncated bulk is used");

  if (opts.exterior) {
    const BoundaryS s = boundary_s(map, *opts.exterior);
    report.boundary_term =
        boundary_term(opts.exterior->sigma, rule, boundary_mode_for(which), s, which.alpha, opts.exec);
  }
  const double bulk = report.bulk->total();
  const double boundary = report.boundary_term.value_or(0.0);
  report.balance_residual = std::abs(report.limit - bulk - boundary);
  report.balance_tolerance =
      opts.relative_tolerance * std::max({std::abs(report.limit), std::abs(bulk), opts.absolute_floor});
  report.balance_ok = *report.balance_residual <= *report.balance_tolerance;
  if (report.boundary_term && std::abs(report.limit - bulk + boundary) < *report.balance_residual)
    report.warnings.push_back("ConventionWarning: the balance improves with the opposite boundary-term sign");

  const auto points = opts.certification_points.empty()
                          ? annulus_points(64, map.n, cert_inner, std::max(Rmax, 2.0 * cert_inner), 7)
                          : opts.certification_points;
  report.normal_bundle = sample_normal_bundle(map, points, opts.exec);
  if (which.kind == MassKind::P2) {
    report.positivity_checked = report.normal_bundle->flat && report.normal_bundle->min_l2 >= 0.0;
    if (*report.positivity_checked) {
      const double tol = std::max(report.fit ? report.fit->uncertainty : 0.0, opts.absolute_floor);
      report.positivity_ok = report.limit >= -tol;
    }
  }
  return report;
}

DecayReport asymptotic_flatness_diagnostic(const MapSpec& map, std::span<const double> radii,
                                           const QuadratureRule& directions) {
  if (directions.n != map.n) throw DimensionError("direction rule dimension differs from the map's");
  if (radii.size() < 2) throw Error("decay fit needs at least two radii");
  DecayReport d;
  for (double R : radii) {
    double sup = 0.0;
    for (std::size_t i = 0; i < directions.size(); ++i) {
      const auto u = directions.node(i);
      std::vector<double> x(u.begin(), u.end());
      for (double& c : x) c *= R;
      const auto jet = eval_jet3(map, x);
      double m1 = 0.0, m2 = 0.0, m3 = 0.0;
      for (int a = 0; a < map.m; ++a)
        for (int p = 0; p < map.n; ++p) {
          m1 = std::max(m1, std::abs(jet.d1(a, p)));
          for (int q = 0; q < map.n; ++q) {
            m2 = std::max(m2, std::abs(jet.d2(a, p, q)));
            for (int s = 0; s < map.n; ++s) m3 = std::max(m3, std::abs(jet.d3(a, p, q, s)));
          }
        }
      sup = std::max(sup, m1 + m2 * R + m3 * R * R);
    }
    d.samples.emplace_back(R, sup);
  }
  const bool all_zero = std::all_of(d.samples.begin(), d.samples.end(), [](const auto& s) { return s.second == 0.0; });
  if (all_zero) {
    d.zero = true;
    d.decay_exponent = d.tau = std::numeric_limits<double>::infinity();
  } else if (std::any_of(d.samples.begin(), d.samples.end(), [](const auto& s) { return s.second == 0.0; })) {
    d.decay_exponent = d.tau = 0.0;
  } else {
    d.decay_exponent = -log_log_slope(d.samples);
    d.tau = 2.0 * d.decay_exponent;
  }
  d.p2_ok = d.tau > (map.n - 4.0) / 3.0;
  d.egb_ok = d.tau > (map.n - 2.0) / 2.0;
  return d;
}

HorizonDivergenceReport horizon_divergence_diagnostic(const MapSpec& map, const HypersurfaceSpec& sigma,
                                                      const QuadratureRule& directions,
                                                      std::span<const double> distances) {
  if (directions.n != map.n || sigma.n != map.n) throw DimensionError("dimensions differ");
  HorizonDivergenceReport h;
  if (distances.empty())
    h.distances = {1e-1, 1e-2, 1e-3, 1e-4};
  else
    h.distances.assign(distances.begin(), distances.end());
  if (h.distances.size() < 2) throw Error("divergence fit needs at least two distances");
  h.min_rate = std::numeric_limits<double>::infinity();
  bool grows = true;
  for (std::size_t i = 0; i < directions.size(); ++i) {
    const auto u = directions.node(i);
    const double rho = radius_at(sigma, u);
    std::vector<double> s_ray;
    std::vector<std::pair<double, double>> fit;
    bool any_zero = false;
    for (double t : h.distances) {
      std::vector<double> x(u.begin(), u.end());
      for (double& c : x) c *= rho * (1.0 + t);
      const auto jet = eval_jet3(map, x);
      double s = 0.0;
      for (int a = 0; a < map.m; ++a)
        for (int k = 0; k < map.n; ++k) s += jet.d1(a, k) * jet.d1(a, k);
      s_ray.push_back(s);
      if (s > 0.0)
        fit.emplace_back(t, s);
      else
        any_zero = true;
    }
    const double rate = any_zero ? 0.0 : -log_log_slope(fit);
    h.rates.push_back(rate);
    h.min_rate = std::min(h.min_rate, rate);
    // Order the ray's samples from far to near before comparing growth.
    const auto [near, far] = h.distances.front() < h.distances.back()
                                 ? std::pair{s_ray.front(), s_ray.back()}
                                 : std::pair{s_ray.back(), s_ray.front()};
    if (!(near >= 10.0 * far) || any_zero) grows = false;
    h.s_values.push_back(std::move(s_ray));
  }
  h.diverges = grows && h.min_rate >= 0.25;
  h.note = h.diverges ? "|Df|^2 diverges toward the hypersurface on every sampled ray"
                      : "no divergence of |Df|^2 detected: not a horizon";
  return h;
}

}  // namespace gbclab
