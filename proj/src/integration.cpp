#include "gbclab/integration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gbclab/error.hpp"
#include "gbclab/geometry.hpp"

namespace gbclab {

std::string to_string(MassSelector s) {
  switch (s.kind) {
    case MassKind::AdmRaw: return "ADM_raw";
    case MassKind::P1: return "P1";
    case MassKind::P2: return "P2";
    case MassKind::Egb: {
      std::ostringstream os;
      os << "EGB(" << s.alpha << ")";
      return os.str();
    }
  }
  return "?";
}

double gbc_constant(int n) { return 1.0 / (2.0 * (n - 1) * (n - 2) * (n - 3) * sphere_area(n)); }

double flux_constant(MassSelector s, int n) {
  switch (s.kind) {
    case MassKind::AdmRaw: return 1.0 / (2.0 * (n - 1) * sphere_area(n));
    case MassKind::P1:
    case MassKind::Egb: return 1.0 / ((n - 1) * sphere_area(n));
    case MassKind::P2: return gbc_constant(n);
  }
  return 0.0;
}

double bulk_constant(MassSelector s, int n) {
  switch (s.kind) {
    case MassKind::AdmRaw: throw Error("the raw ADM flux has no bulk formula");
    case MassKind::P1:
    case MassKind::Egb: return 1.0 / (2.0 * (n - 1) * sphere_area(n));
    case MassKind::P2: return 0.5 * gbc_constant(n);
  }
  return 0.0;
}

double flux_density(const MapSpec& map, MassSelector s, std::span<const double> x) {
  double r2 = 0.0;
  for (double c : x) r2 += c * c;
  const double r = std::sqrt(r2);
  if (s.kind == MassKind::AdmRaw) {
    const auto fo = first_order(eval_jet3(map, x));
    const Vector v = adm_raw_vector(fo);
    double dot = 0.0;
    for (int i = 0; i < map.n; ++i) dot += v(i) * x[i];
    return dot / r;
  }
  const auto pg = geometry_at(map, x, {.normal_terms = false, .verify_paths = false});
  double dot = 0.0;
  for (int i = 0; i < map.n; ++i) {
    double f = 0.0;
    switch (s.kind) {
      case MassKind::P1: f = pg.cd.flux1(i); break;
      case MassKind::P2: f = pg.cd.flux2(i); break;
      default: f = pg.cd.flux1(i) + s.alpha * pg.cd.flux2(i); break;
    }
    dot += f * x[i];
  }
  return dot / r;
}

double bulk_density(const MapSpec& map, MassSelector s, std::span<const double> x) {
  const auto pg = geometry_at(map, x, {.normal_terms = true, .verify_paths = false});
  const auto& cd = pg.cd;
  switch (s.kind) {
    case MassKind::P2: return cd.L2 + cd.L2perp;
    case MassKind::P1: return cd.scalar + cd.RperpScalar;
    case MassKind::Egb: return cd.scalar + s.alpha * cd.L2 + cd.RperpScalar + s.alpha * cd.L2perp;
    case MassKind::AdmRaw: break;
  }
  throw Error("the raw ADM flux has no bulk formula");
}

double surface_flux(const MapSpec& map, MassSelector s, double radius, const QuadratureRule& rule, Execution exec) {
  if (!(radius > 0.0)) throw Error("surface flux needs a positive radius");
  if (rule.n != map.n) throw DimensionError("quadrature rule dimension differs from the map's");
  const double integral = integrate_sphere(
      rule,
      [&](std::span<const double> u) {
        std::vector<double> x(u.begin(), u.end());
        for (double& c : x) c *= radius;
        return flux_density(map, s, x);
      },
      exec);
  return flux_constant(s, map.n) * std::pow(radius, map.n - 1) * integral;
}

namespace {

// Gauss-Legendre sum of density(r u) r^{n-1} over [a, b].
double radial_segment(const std::function<double(std::span<const double>)>& density, std::span<const double> u,
                      int n, double a, double b, const GaussRule& gl, std::vector<double>& x) {
  const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
  double sum = 0.0;
  for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
    const double r = mid + half * gl.nodes[q];
    for (int i = 0; i < n; ++i) x[i] = r * u[i];
    sum += gl.weights[q] * density(x) * std::pow(r, n - 1);
  }
  return half * sum;
}

std::vector<double> geometric_breaks(double start, double R, double core) {
  std::vector<double> b{start};
  double next = start > 0.0 ? 2.0 * start : std::min(core, R);
  while (b.back() < R) {
    b.push_back(std::min(next, R));
    next = 2.0 * b.back();
  }
  return b;
}

}  // namespace

VolumeIntegral volume_integral(const std::function<double(std::span<const double>)>& density, int n, double r0,
                               double R, const QuadratureRule& rule, const VolumeOptions& opts) {
  if (rule.n != n) throw DimensionError("quadrature rule dimension differs from the integrand's");
  if (opts.radial_points < 1) throw Error("radial_points must be positive");
  const GaussRule gl = gauss_legendre(opts.radial_points);

  std::vector<double> inner;
  double start = r0;
  double inner_min = r0;
  if (opts.inner_radius) {
    inner.resize(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
      inner[i] = opts.inner_radius(rule.node(i));
      if (!(inner[i] > 0.0) || !std::isfinite(inner[i]))
        throw DomainError("inner radius must be positive at sphere node " + std::to_string(i));
    }
    start = *std::max_element(inner.begin(), inner.end());
    inner_min = *std::min_element(inner.begin(), inner.end());
  }
  if (!(start >= 0.0) || !(R > start)) throw Error("volume integral needs 0 <= inner radius < R");
  if (!(opts.core_radius > 0.0)) throw Error("core_radius must be positive");

  const std::vector<double> breaks = geometric_breaks(start, R, opts.core_radius);
  const std::size_t outer_shells = breaks.size() - 1;
  const std::size_t lead = opts.inner_radius && inner_min < start ? 1 : 0;  // per-direction piece up to `start`
  const std::size_t width = lead + outer_shells;

  const auto rows = parallel::evaluate_rows(
      rule.size(), width,
      [&](std::size_t i, std::span<double> out) {
        const auto u = rule.node(i);
        std::vector<double> x(n);
        if (lead) {
          double acc = 0.0;
          double a = inner[i];
          while (a < start) {
            const double b = std::min(2.0 * a, start);
            acc += radial_segment(density, u, n, a, b, gl, x);
            a = b;
          }
          out[0] = acc;
        }
        for (std::size_t s = 0; s < outer_shells; ++s)
          out[lead + s] = radial_segment(density, u, n, breaks[s], breaks[s + 1], gl, x);
      },
      opts.exec);

  VolumeIntegral result;
  std::vector<double> weighted(rule.size());
  for (std::size_t s = 0; s < width; ++s) {
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double v = rows[i * width + s];
      if (!std::isfinite(v)) throw DomainError("non-finite density along sphere node " + std::to_string(i));
      weighted[i] = rule.weights[i] * v;
    }
    Shell sh;
    sh.value = parallel::pairwise_sum(weighted);
    if (lead && s == 0) {
      sh.inner = inner_min;
      sh.outer = start;
    } else {
      sh.inner = breaks[s - lead];
      sh.outer = breaks[s - lead + 1];
    }
    result.shells.push_back(sh);
  }
  std::vector<double> values;
  for (const auto& sh : result.shells) values.push_back(sh.value);
  result.value = parallel::pairwise_sum(values);
  return result;
}

VolumeIntegral shell_volume_integral(const MapSpec& map, MassSelector s, double r0, double R,
                                     const QuadratureRule& rule, const VolumeOptions& opts) {
  if (s.kind == MassKind::AdmRaw) throw Error("the raw ADM flux has no bulk formula");
  return volume_integral([&](std::span<const double> x) { return bulk_density(map, s, x); }, map.n, r0, R, rule,
                         opts);
}

TailEstimate tail_estimate(std::span<const Shell> shells) {
  TailEstimate t;
  std::vector<const Shell*> full;
  for (const auto& s : shells)
    if (s.inner > 0.0 && std::abs(s.outer - 2.0 * s.inner) <= 1e-12 * s.outer) full.push_back(&s);
  if (full.size() < 3) return t;
  const std::size_t k = full.size();
  const Shell& a = *full[k - 3];
  const Shell& b = *full[k - 2];
  const Shell& c = *full[k - 1];
  if (c.value == 0.0 && b.value == 0.0) {
    t.reliable = true;
    t.exponent = std::numeric_limits<double>::infinity();
    return t;
  }
  if (a.value * b.value <= 0.0 || b.value * c.value <= 0.0) return t;
  // Slope of log|value| against log(inner) over the last three full shells.
  const double x0 = std::log(a.inner), x1 = std::log(b.inner), x2 = std::log(c.inner);
  const double y0 = std::log(std::abs(a.value)), y1 = std::log(std::abs(b.value)), y2 = std::log(std::abs(c.value));
  const double mx = (x0 + x1 + x2) / 3.0, my = (y0 + y1 + y2) / 3.0;
  const double slope = ((x0 - mx) * (y0 - my) + (x1 - mx) * (y1 - my) + (x2 - mx) * (y2 - my)) /
                       ((x0 - mx) * (x0 - mx) + (x1 - mx) * (x1 - mx) + (x2 - mx) * (x2 - mx));
  const double q = -slope;
  t.exponent = q;
  if (!(q > 0.0)) return t;
  // Shell [a, 2a] of c r^{-q-1} is (c/q) a^{-q} (1 - 2^{-q}); the tail beyond
  // the outermost shell end is (c/q) R^{-q}.
  const double tail_end = shells.back().outer;
  const double cq = c.value / (std::pow(c.inner, -q) * (1.0 - std::pow(2.0, -q)));
  t.value = cq * std::pow(tail_end, -q);
  t.reliable = true;
  return t;
}

}  // namespace gbclab
