#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gbclab/expr.hpp"

namespace gbclab::testing {

// Reference maps in n = 5.
inline const char* kRadialM1 = "0.9*(1+x1^2+x2^2+x3^2+x4^2+x5^2)^(-0.25)";
inline const char* kFlatNormalM2 =
    "0.8*(1+x1^2+2*x2^2+x3^2+x4^2+0.5*x5^2)^(-0.25); 0.6*(1+x1^2+2*x2^2+x3^2+x4^2+0.5*x5^2)^(-0.25)";
inline const char* kGenericM2 =
    "0.3*x1*x2 + 0.2*sin(x3) + 0.1*x4^2 - 0.15*x5*x1; "
    "0.25*x2^2 - 0.2*x3*x4 + 0.1*cos(x5) + 0.05*x1*x3";
// Mass profile c (1 + r^2)^(-1/4) with c = (0.8, 0.6).
inline const char* kMassProfileM2 =
    "0.8*(1+x1^2+x2^2+x3^2+x4^2+x5^2)^(-0.25); 0.6*(1+x1^2+x2^2+x3^2+x4^2+x5^2)^(-0.25)";

inline std::vector<double> random_point(std::mt19937_64& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

/// Random expression in x1..xn that is smooth on the whole of R^n.
inline std::string random_expression(std::mt19937_64& rng, int n, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 11);
  std::uniform_real_distribution<double> coef(-1.5, 1.5);
  std::uniform_int_distribution<int> var(1, n);
  auto num = [&] {
    std::string s = std::to_string(coef(rng));
    return s[0] == '-' ? "(" + s + ")" : s;
  };
  auto sub = [&] { return random_expression(rng, n, depth - 1); };
  switch (pick(rng)) {
    case 0: return "x" + std::to_string(var(rng));
    case 1: return num();
    case 2: return "(" + sub() + " + " + sub() + ")";
    case 3: return "(" + sub() + " - " + sub() + ")";
    case 4: return "(" + sub() + " * " + sub() + ")";
    case 5: return "sin(" + sub() + ")";
    case 6: return "cos(" + sub() + ")";
    case 7: return "atan(" + sub() + ")";
    case 8: return "exp(0.3*tanh(" + sub() + "))";
    case 9: return "sqrt(1 + (" + sub() + ")^2)";
    case 10: return "log(2.5 + sin(" + sub() + "))";
    default: return "(" + sub() + ") / (2 + cos(" + sub() + "))^1.5";
  }
}

/// Jet of a scalar expression as order-3 derivatives. Each derivative level
/// is compared with a central difference of the level below at steps h and
/// h/2; the check passes when the error is at the rounding floor or shrinks
/// with order 2.
struct FdJetCheck {
  bool ok = true;
  double worst_ratio = 4.0;
  std::string detail;
};

inline FdJetCheck fd_jet_check(const MapSpec& map, const std::vector<double>& x, double h) {
  FdJetCheck out;
  const int n = map.n;
  auto at = [&](const std::vector<double>& p) { return eval_jet3(map, p); };
  const MapJet3 j0 = at(x);
  for (int a = 0; a < map.m; ++a) {
    double scale = std::abs(j0.value(a));
    for (int i = 0; i < n; ++i) {
      scale = std::max(scale, std::abs(j0.d1(a, i)));
      for (int k = 0; k < n; ++k) {
        scale = std::max(scale, std::abs(j0.d2(a, i, k)));
        for (int l = 0; l < n; ++l) scale = std::max(scale, std::abs(j0.d3(a, i, k, l)));
      }
    }
    for (int i = 0; i < n; ++i) {
      // err[level][step] for the largest discrepancy in direction i.
      double err[3][2] = {};
      for (int s = 0; s < 2; ++s) {
        const double hs = s == 0 ? h : 0.5 * h;
        auto xp = x, xm = x;
        xp[i] += hs;
        xm[i] -= hs;
        const MapJet3 jp = at(xp), jm = at(xm);
        err[0][s] = std::abs((jp.value(a) - jm.value(a)) / (2 * hs) - j0.d1(a, i));
        for (int k = 0; k < n; ++k) {
          err[1][s] = std::max(err[1][s], std::abs((jp.d1(a, k) - jm.d1(a, k)) / (2 * hs) - j0.d2(a, i, k)));
          for (int l = 0; l < n; ++l)
            err[2][s] =
                std::max(err[2][s], std::abs((jp.d2(a, k, l) - jm.d2(a, k, l)) / (2 * hs) - j0.d3(a, i, k, l)));
        }
      }
      for (int lvl = 0; lvl < 3; ++lvl) {
        const double floor = 1e-9 * (1.0 + scale);
        if (err[lvl][0] <= floor) continue;
        const double ratio = err[lvl][0] / std::max(err[lvl][1], 1e-300);
        out.worst_ratio = std::min(out.worst_ratio, ratio);
        if (ratio < 3.0 || ratio > 5.5) {
          out.ok = false;
          out.detail = "level " + std::to_string(lvl + 1) + " direction " + std::to_string(i + 1) +
                       " error ratio " + std::to_string(ratio);
        }
      }
    }
  }
  return out;
}

}  // namespace gbclab::testing
