#pragma once

#include <span>

namespace gbclab {

/// Limit of a sequence sampled at increasing radii, from v = a + b R^{-p}.
struct ExtrapolationResult {
  double limit = 0.0;         // a
  double rate = 0.0;          // p; +inf for a constant sequence
  double fit_residual = 0.0;  // rms of the fit residuals
  double uncertainty = 0.0;   // drop-first-sample spread plus fit_residual
};

struct ExtrapolationOptions {
  double min_rate = 0.05;
  double max_rate = 16.0;
  /// rms residual allowed, relative to the spread max(v) - min(v)
  double max_relative_residual = 1e-2;
  /// sequences whose spread is at most this are treated as constant
  double absolute_floor = 0.0;
};

/// Variable-projection least squares: (a, b) solved linearly for each p and p
/// minimised by Brent's method after a coarse scan. Needs at least 3 samples
/// with strictly increasing radii. Raises FitFailure for non-monotone
/// sequences, non-decaying increments (p <= 0) and residuals above tolerance.
ExtrapolationResult extrapolate(std::span<const double> radii, std::span<const double> values,
                                const ExtrapolationOptions& opts = {});

}  // namespace gbclab
