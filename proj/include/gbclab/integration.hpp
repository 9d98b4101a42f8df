#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gbclab/expr.hpp"
#include "gbclab/parallel.hpp"
#include "gbclab/quadrature.hpp"

namespace gbclab {

/// Which mass a flux or bulk integral belongs to. AdmRaw is surface-only.
enum class MassKind { AdmRaw, P1, P2, Egb };

struct MassSelector {
  MassKind kind = MassKind::P2;
  double alpha = 0.0;  // EGB coupling
};

std::string to_string(MassSelector s);

/// The constant multiplying the surface flux:
/// 1/(2(n-1) w) for AdmRaw, 1/((n-1) w) for P1 and Egb, c2(n) for P2,
/// with w the area of S^{n-1}.
double flux_constant(MassSelector s, int n);

/// c2(n) = 1 / (2 (n-1)(n-2)(n-3) w_{n-1}).
double gbc_constant(int n);

/// The constant multiplying the volume integral of the divergence right side:
/// c2(n)/2 for P2, 1/(2(n-1) w) for P1 and Egb.
double bulk_constant(MassSelector s, int n);

/// Normal component of the selected flux vector at x, with nu = x/|x|.
double flux_density(const MapSpec& map, MassSelector s, std::span<const double> x);

/// Integrand of the bulk formula at x: L2 + L2perp, R + Rperp, or
/// R + a L2 + Rperp + a L2perp. Flat volume element.
double bulk_density(const MapSpec& map, MassSelector s, std::span<const double> x);

/// flux_constant * integral over the coordinate sphere |x| = R of the flux
/// density, Euclidean area element.
double surface_flux(const MapSpec& map, MassSelector s, double radius, const QuadratureRule& rule,
                    Execution exec = Execution::Parallel);

/// One radial shell of a volume integral.
struct Shell {
  double inner = 0.0;
  double outer = 0.0;
  double value = 0.0;  // unscaled integral of the density over the shell
};

struct VolumeIntegral {
  double value = 0.0;          // sum of the shells
  std::vector<Shell> shells;
};

struct VolumeOptions {
  int radial_points = 16;       // Gauss-Legendre points per shell
  double core_radius = 1.0;     // first shell when the inner radius is 0
  /// Optional direction-dependent inner radius (an exterior domain). When set,
  /// r0 is ignored and the region is rho(u) <= r <= R.
  std::function<double(std::span<const double>)> inner_radius;
  Execution exec = Execution::Parallel;
};

/// Integral of `density` over r0 <= |x| <= R with the flat volume element,
/// as a sum over a geometric (ratio 2) partition of the radius with
/// Gauss-Legendre points per shell and `rule` in the angles.
VolumeIntegral volume_integral(const std::function<double(std::span<const double>)>& density, int n, double r0,
                               double R, const QuadratureRule& rule, const VolumeOptions& opts = {});

/// volume_integral of bulk_density for the selected mass (unscaled).
VolumeIntegral shell_volume_integral(const MapSpec& map, MassSelector s, double r0, double R,
                                     const QuadratureRule& rule, const VolumeOptions& opts = {});

/// Power-law tail beyond the last shell: fits |shell value| ~ C outer^{-q} over
/// the last shells of a ratio-2 partition and sums the geometric series.
struct TailEstimate {
  double value = 0.0;
  double exponent = 0.0;  // q; the shells of a density ~ r^{-d} decay with q = d - n
  bool reliable = false;  // false when fewer than 3 usable shells or q <= 0
};
TailEstimate tail_estimate(std::span<const Shell> shells);

}  // namespace gbclab
