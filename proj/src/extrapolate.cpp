#include "gbclab/extrapolate.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "gbclab/error.hpp"

namespace gbclab {

namespace {

struct LinearFit {
  double a = 0.0;
  double b = 0.0;
  double sse = 0.0;
};

// Weighted least squares for v = a + b R^{-p} at fixed p. Sample j is
// weighted by the inverse square of its local increment |v_j - v_{j-1}|, so
// every sample counts relative to how far the sequence still moves there and
// the omitted faster-decaying terms cannot dominate through the first radius.
// The weights depend only on the data, never on p.
LinearFit fit_fixed_rate(std::span<const double> radii, std::span<const double> values,
                         std::span<const double> w, double p) {
  const std::size_t n = radii.size();
  std::vector<double> x(n);
  const double rmax = radii[n - 1];
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = std::pow(radii[j] / rmax, -p);
    sw += w[j];
    sx += w[j] * x[j];
    sy += w[j] * values[j];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    sxx += w[j] * (x[j] - mx) * (x[j] - mx);
    sxy += w[j] * (x[j] - mx) * (values[j] - my);
  }
  LinearFit fit;
  fit.b = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.a = my - fit.b * mx;
  for (std::size_t j = 0; j < n; ++j) {
    const double r = values[j] - fit.a - fit.b * x[j];
    fit.sse += w[j] * r * r;
  }
  return fit;
}

std::vector<double> increment_weights(std::span<const double> values, double floor) {
  const std::size_t n = values.size();
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double d = std::abs(j == 0 ? values[1] - values[0] : values[j] - values[j - 1]);
    w[j] = 1.0 / std::max(d * d, floor * floor);
  }
  return w;
}

struct Fit {
  double a = 0.0;
  double p = 0.0;
  double rms = 0.0;
};

Fit fit_power_law(std::span<const double> radii, std::span<const double> values, const ExtrapolationOptions& opts) {
  const double lo = std::log(opts.min_rate), hi = std::log(opts.max_rate);
  const auto [vmin, vmax] = std::minmax_element(values.begin(), values.end());
  const double floor = std::max(1e-300, 1e-12 * (*vmax - *vmin));
  const auto w = increment_weights(values, floor);
  double wsum = 0.0;
  for (double x : w) wsum += x;
  auto objective = [&](double lp) { return fit_fixed_rate(radii, values, w, std::exp(lp)).sse; };

  constexpr int kScan = 96;
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kScan; ++k) {
    const double v = objective(lo + (hi - lo) * k / kScan);
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  const double a = lo + (hi - lo) * std::max(best - 1, 0) / kScan;
  const double b = lo + (hi - lo) * std::min(best + 1, kScan) / kScan;
  const auto [lp, sse] = boost::math::tools::brent_find_minima(objective, a, b, 52);
  const double p = std::exp(lp);
  if (p <= opts.min_rate * (1.0 + 1e-6)) throw FitFailure("power-law fit drove the decay rate to its lower bound");
  const LinearFit lin = fit_fixed_rate(radii, values, w, p);
  // rms residual in value units: weighted mean square times the mean weight scale
  return {lin.a, p, std::sqrt(std::max(sse, 0.0) / wsum)};
}

}  // namespace

ExtrapolationResult extrapolate(std::span<const double> radii, std::span<const double> values,
                                const ExtrapolationOptions& opts) {
  const std::size_t n = radii.size();
  if (n != values.size()) throw Error("extrapolation needs one value per radius");
  if (n < 3) throw FitFailure("extrapolation needs at least 3 samples");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(radii[j]) || !std::isfinite(values[j]) || radii[j] <= 0.0)
      throw FitFailure("non-finite sample or non-positive radius");
    if (j > 0 && radii[j] <= radii[j - 1]) throw FitFailure("radii must increase strictly");
  }

  const auto [vmin, vmax] = std::minmax_element(values.begin(), values.end());
  const double spread = *vmax - *vmin;
  const double scale = std::max(std::abs(*vmin), std::abs(*vmax));
  if (spread <= std::max(opts.absolute_floor, 4.0 * std::numeric_limits<double>::epsilon() * scale)) {
    return {values[n - 1], std::numeric_limits<double>::infinity(), 0.0, spread};
  }

  // Monotone with shrinking increments, up to rounding of the values.
  const double noise = 16.0 * std::numeric_limits<double>::epsilon() * scale + opts.absolute_floor;
  int sign = 0;
  for (std::size_t j = 1; j < n; ++j) {
    const double d = values[j] - values[j - 1];
    if (std::abs(d) <= noise) continue;
    const int s = d > 0 ? 1 : -1;
    if (sign != 0 && s != sign) throw FitFailure("sequence is not monotone in the radius");
    sign = s;
  }
  for (std::size_t j = 2; j < n; ++j) {
    const double d0 = std::abs(values[j - 1] - values[j - 2]);
    const double d1 = std::abs(values[j] - values[j - 1]);
    if (d1 > noise && d1 >= d0) throw FitFailure("increments do not decay with the radius");
  }

  const Fit full = fit_power_law(radii, values, opts);
  if (full.rms > opts.max_relative_residual * spread)
    throw FitFailure("power-law fit residual " + std::to_string(full.rms) + " exceeds tolerance");

  ExtrapolationResult out;
  out.limit = full.a;
  out.rate = full.p;
  out.fit_residual = full.rms;
  if (n >= 4) {
    double drop = values[n - 1];
    try {
      drop = fit_power_law(radii.subspan(1), values.subspan(1), opts).a;
    } catch (const FitFailure&) {
      // fall back to the last sample
    }
    out.uncertainty = std::abs(full.a - drop) + full.rms;
  } else {
    out.uncertainty = std::abs(full.a - values[n - 1]);
  }
  return out;
}

}  // namespace gbclab
