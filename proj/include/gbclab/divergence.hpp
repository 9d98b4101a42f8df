#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gbclab/expr.hpp"
#include "gbclab/geometry.hpp"
#include "gbclab/parallel.hpp"

namespace gbclab {

enum class IdentityKind { P1, P2, Egb };

/// Which divergence identity to test. With include_normal_terms false the
/// right side omits L2perp / Rperp (the negative control).
struct IdentitySelector {
  IdentityKind kind = IdentityKind::P2;
  double alpha = 0.0;
  bool include_normal_terms = true;
};

std::string to_string(const IdentitySelector& s);

/// Flux vector of the selected identity at a computed point: F1, F2 or F1 + a F2.
Vector identity_flux(const CurvatureData& cd, const IdentitySelector& s);

/// Right side: (L2 + L2perp)/2, (R + Rperp)/2 or (R + a L2 + Rperp + a L2perp)/2.
double identity_rhs(const CurvatureData& cd, const IdentitySelector& s);

/// |terms| of the right side summed: the scale residuals are judged against.
double identity_scale(const CurvatureData& cd, const IdentitySelector& s);

/// Central-difference divergence sum_i (F^i(x + h e_i) - F^i(x - h e_i)) / 2h.
double divergence_fd(const MapSpec& map, const IdentitySelector& s, std::span<const double> x, double h);

struct IdentityResidual {
  std::vector<double> point;
  std::vector<double> steps;
  std::vector<double> lhs;        // FD divergence per step
  double rhs = 0.0;
  double scale = 0.0;             // identity_scale at the point
  double l2perp = 0.0;            // L2perp at the point, for negative-control bookkeeping
  std::vector<double> residuals;  // |lhs - rhs| per step
  double residual = 0.0;          // at the finest (last) step
  /// Mean observed order across consecutive steps; present only with >= 3
  /// steps and when the residuals are above the rounding floor.
  std::optional<double> order_estimate;
};

/// {1e-2, 5e-3, 2.5e-3} times |x| (times 1 at the origin).
std::vector<double> default_steps(std::span<const double> x);

IdentityResidual identity_residual(const MapSpec& map, const IdentitySelector& s, std::span<const double> x,
                                   std::span<const double> steps);

/// One sweep entry: either a result or the error that stopped this point.
struct SweepRecord {
  std::vector<double> point;
  std::optional<IdentityResidual> result;
  std::string error;
};

/// identity_residual over many points; output order follows input order and
/// errors are recorded per point. Empty `steps` means default_steps per point.
std::vector<SweepRecord> sweep(const MapSpec& map, const IdentitySelector& s,
                               const std::vector<std::vector<double>>& points, std::span<const double> steps,
                               Execution exec = Execution::Parallel);

}  // namespace gbclab
