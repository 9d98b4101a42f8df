#include "gbclab/divergence.hpp"

#include <cmath>
#include <sstream>

#include "gbclab/error.hpp"

namespace gbclab {

std::string to_string(const IdentitySelector& s) {
  std::ostringstream os;
  switch (s.kind) {
    case IdentityKind::P1: os << "P1"; break;
    case IdentityKind::P2: os << "P2"; break;
    case IdentityKind::Egb: os << "EGB(" << s.alpha << ")"; break;
  }
  if (!s.include_normal_terms) os << "-tangential";
  return os.str();
}

Vector identity_flux(const CurvatureData& cd, const IdentitySelector& s) {
  switch (s.kind) {
    case IdentityKind::P1: return cd.flux1;
    case IdentityKind::P2: return cd.flux2;
    case IdentityKind::Egb: return cd.flux1 + s.alpha * cd.flux2;
  }
  return cd.flux1;
}

double identity_rhs(const CurvatureData& cd, const IdentitySelector& s) {
  const double nt = s.include_normal_terms ? 1.0 : 0.0;
  switch (s.kind) {
    case IdentityKind::P1: return 0.5 * (cd.scalar + nt * cd.RperpScalar);
    case IdentityKind::P2: return 0.5 * (cd.L2 + nt * cd.L2perp);
    case IdentityKind::Egb:
      return 0.5 * (cd.scalar + s.alpha * cd.L2 + nt * (cd.RperpScalar + s.alpha * cd.L2perp));
  }
  return 0.0;
}

double identity_scale(const CurvatureData& cd, const IdentitySelector& s) {
  switch (s.kind) {
    case IdentityKind::P1: return 0.5 * (std::abs(cd.scalar) + std::abs(cd.RperpScalar));
    case IdentityKind::P2: return 0.5 * (std::abs(cd.L2) + std::abs(cd.L2perp));
    case IdentityKind::Egb:
      return 0.5 * (std::abs(cd.scalar) + std::abs(s.alpha) * std::abs(cd.L2) + std::abs(cd.RperpScalar) +
                    std::abs(s.alpha) * std::abs(cd.L2perp));
  }
  return 0.0;
}

namespace {

// Fluxes only: skip the normal-bundle scalars and path checks.
constexpr GeometryOptions kFluxOnly{.normal_terms = false, .verify_paths = false};

}  // namespace

double divergence_fd(const MapSpec& map, const IdentitySelector& s, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw Error("finite-difference step must be positive");
  if (static_cast<int>(x.size()) != map.n) throw DimensionError("point dimension differs from the map's");
  std::vector<double> y(x.begin(), x.end());
  double div = 0.0;
  for (int i = 0; i < map.n; ++i) {
    y[i] = x[i] + h;
    const double plus = identity_flux(geometry_at(map, y, kFluxOnly).cd, s)(i);
    y[i] = x[i] - h;
    const double minus = identity_flux(geometry_at(map, y, kFluxOnly).cd, s)(i);
    y[i] = x[i];
    div += (plus - minus) / (2.0 * h);
  }
  return div;
}

std::vector<double> default_steps(std::span<const double> x) {
  double r2 = 0.0;
  for (double c : x) r2 += c * c;
  const double scale = r2 > 0.0 ? std::sqrt(r2) : 1.0;
  return {1e-2 * scale, 5e-3 * scale, 2.5e-3 * scale};
}

IdentityResidual identity_residual(const MapSpec& map, const IdentitySelector& s, std::span<const double> x,
                                   std::span<const double> steps) {
  if (steps.empty()) throw Error("identity_residual needs at least one step");
  IdentityResidual out;
  out.point.assign(x.begin(), x.end());
  out.steps.assign(steps.begin(), steps.end());
  const auto pg = geometry_at(map, x);
  out.rhs = identity_rhs(pg.cd, s);
  out.scale = identity_scale(pg.cd, s);
  out.l2perp = pg.cd.L2perp;
  for (double h : steps) {
    const double lhs = divergence_fd(map, s, x, h);
    out.lhs.push_back(lhs);
    out.residuals.push_back(std::abs(lhs - out.rhs));
  }
  out.residual = out.residuals.back();
  if (steps.size() >= 3) {
    // Residuals at the rounding floor carry no order information.
    const double floor = 1e-12 * (out.scale + 1e-12);
    double sum = 0.0;
    int used = 0;
    bool usable = true;
    for (std::size_t k = 0; k + 1 < steps.size(); ++k) {
      if (out.residuals[k] <= floor || out.residuals[k + 1] <= floor) {
        usable = false;
        break;
      }
      sum += std::log(out.residuals[k] / out.residuals[k + 1]) / std::log(steps[k] / steps[k + 1]);
      ++used;
    }
    if (usable && used > 0) out.order_estimate = sum / used;
  }
  return out;
}

std::vector<SweepRecord> sweep(const MapSpec& map, const IdentitySelector& s,
                               const std::vector<std::vector<double>>& points, std::span<const double> steps,
                               Execution exec) {
  std::vector<SweepRecord> records(points.size());
  // Each worker writes only its own record; errors stay with their point.
  parallel::evaluate(
      points.size(),
      [&](std::size_t i) {
        records[i].point = points[i];
        try {
          const auto st = steps.empty() ? default_steps(points[i]) : std::vector<double>(steps.begin(), steps.end());
          records[i].result = identity_residual(map, s, points[i], st);
        } catch (const std::exception& e) {
          records[i].error = e.what();
        }
        return 0.0;
      },
      exec);
  return records;
}

}  // namespace gbclab
