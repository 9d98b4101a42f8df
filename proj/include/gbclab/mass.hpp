#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gbclab/expr.hpp"
#include "gbclab/extrapolate.hpp"
#include "gbclab/horizon.hpp"
#include "gbclab/integration.hpp"

namespace gbclab {

struct BulkResult {
  double truncated = 0.0;       // scaled integral up to the outer radius
  double tail = 0.0;            // scaled power-law tail beyond it (not included above)
  double tail_exponent = 0.0;
  bool tail_reliable = false;
  double inner_radius = 0.0;
  double outer_radius = 0.0;
  std::vector<Shell> shells;    // unscaled
  double total() const { return truncated + (tail_reliable ? tail : 0.0); }
};

/// Flat-normal-bundle and positivity evidence sampled at points.
struct NormalBundleSample {
  int points = 0;
  double max_normal_ratio = 0.0;  // max ||Rperp|| / (1 + ||A||^2)
  double min_l2 = 0.0;
  bool flat = false;              // m == 1 or max_normal_ratio <= 1e-10
};

struct MassReport {
  MassSelector which;
  int n = 0;
  int m = 0;
  int quadrature_level = 0;
  int radial_points = 0;
  std::vector<std::pair<double, double>> per_radius;  // (R, flux)
  std::optional<ExtrapolationResult> fit;
  std::string fit_error;
  double limit = 0.0;
  std::optional<BulkResult> bulk;
  std::optional<double> boundary_term;
  std::optional<double> balance_residual;     // |limit - bulk total - boundary|
  std::optional<double> balance_tolerance;
  std::optional<bool> balance_ok;
  std::optional<NormalBundleSample> normal_bundle;
  std::optional<bool> positivity_checked;     // hypotheses hold (m = 1 or flat, L2 >= 0 sampled)
  std::optional<bool> positivity_ok;          // limit >= -tolerance
  std::vector<std::string> warnings;
};

/// Defining fluxes at each radius and their extrapolated limit. DimensionError
/// for P2 with n < 5 and EGB with n < 4; FitFailure when the sequence does not
/// extrapolate.
MassReport mass_surface(const MapSpec& map, MassSelector which, std::span<const double> radii,
                        const QuadratureRule& rule, Execution exec = Execution::Parallel);

/// Bulk formula over r0 <= |x| <= Rmax (or the exterior of an inner radius
/// function when opts.inner_radius is set), with a power-law tail estimate.
BulkResult mass_bulk(const MapSpec& map, MassSelector which, double r0, double Rmax, const QuadratureRule& rule,
                     const VolumeOptions& opts = {});

/// Samples ||Rperp|| / (1 + ||A||^2) and L2 at `points` (or at quasi-random
/// points in 1 <= |x| <= 4 when `points` is empty).
NormalBundleSample sample_normal_bundle(const MapSpec& map, const std::vector<std::vector<double>>& points,
                                        Execution exec = Execution::Parallel);

/// How |Df|^2 is obtained on an exterior boundary.
enum class BoundarySMode { FromMap, Horizon, Expression };

struct ExteriorDomain {
  HypersurfaceSpec sigma;
  BoundarySMode s_mode = BoundarySMode::Horizon;
  ExprPtr s_expression;  // in u1..un, for BoundarySMode::Expression
};

struct BalanceOptions {
  double r0 = 0.0;                 // whole-space runs
  double core_radius = 1.0;
  int radial_points = 16;
  double relative_tolerance = 1e-2;
  double absolute_floor = 1e-10;
  std::optional<ExteriorDomain> exterior;
  std::vector<std::vector<double>> certification_points;  // empty: quasi-random annulus points
  Execution exec = Execution::Parallel;
};

/// Surface limit, bulk integral, optional boundary term and their balance.
/// Raises PreconditionError when f is not constant on the exterior boundary.
MassReport mass_balance(const MapSpec& map, MassSelector which, std::span<const double> radii,
                        const QuadratureRule& rule, const BalanceOptions& opts = {});

struct DecayReport {
  std::vector<std::pair<double, double>> samples;  // (R, sup-norm of the weighted jet)
  double decay_exponent = 0.0;  // sup-norm ~ R^{-decay_exponent}
  double tau = 0.0;             // 2 * decay_exponent
  bool zero = false;            // jet identically zero: exponent infinite
  bool p2_ok = false;           // tau > (n-4)/3
  bool egb_ok = false;          // tau > (n-2)/2
};

/// Sup over directions of |f_i| + |f_ij||x| + |f_ijk||x|^2 at each radius and
/// its log-log decay rate. Advisory only.
DecayReport asymptotic_flatness_diagnostic(const MapSpec& map, std::span<const double> radii,
                                           const QuadratureRule& directions);

struct HorizonDivergenceReport {
  std::vector<double> distances;                 // relative offsets t along each ray
  std::vector<std::vector<double>> s_values;     // per ray, |Df|^2 at rho(u)(1+t)
  std::vector<double> rates;                     // per ray: |Df|^2 ~ t^{-rate}
  double min_rate = 0.0;
  bool diverges = false;
  std::string note;
};

/// Samples |Df|^2 along rays approaching the hypersurface from outside.
HorizonDivergenceReport horizon_divergence_diagnostic(const MapSpec& map, const HypersurfaceSpec& sigma,
                                                      const QuadratureRule& directions,
                                                      std::span<const double> distances = {});

}  // namespace gbclab
