#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gbclab/expr.hpp"
#include "gbclab/parallel.hpp"
#include "gbclab/quadrature.hpp"
#include "gbclab/tensor.hpp"

namespace gbclab {

/// Star-shaped hypersurface X(u) = rho(u) u over the unit sphere of R^n;
/// rho is an expression in u1..un.
struct HypersurfaceSpec {
  int n = 0;
  ExprPtr rho;
  std::string source;
};

HypersurfaceSpec parse_hypersurface(std::string_view rho_source, int n);

/// rho at a unit vector; DomainError unless finite and positive.
double radius_at(const HypersurfaceSpec& spec, std::span<const double> u);

struct FundamentalForms {
  Matrix first;             // I_ab = X_a . X_b
  Matrix second;            // II_ab = -X_ab . N, positive on round spheres
  std::vector<double> point;
  std::vector<double> normal;  // outward unit normal
  double area_density = 0.0;   // sqrt(det I)
};

/// Forms in the hyperspherical chart at `angles` (n-1 values).
/// DegenerateChart when I is singular there (chart poles).
FundamentalForms fundamental_forms(const HypersurfaceSpec& spec, std::span<const double> angles);

struct SigmaCurvatures {
  std::vector<double> kappa;  // principal curvatures, ascending
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double sigma3 = 0.0;
};

/// Elementary symmetric functions (not normalised) of the eigenvalues of
/// I^{-1} II, from the generalized symmetric eigenproblem II v = k I v.
SigmaCurvatures sigma_curvatures(const FundamentalForms& forms);

/// sigma_k of a list of numbers; sigma_0 = 1.
double elementary_symmetric(std::span<const double> values, int k);

/// Integral over the hypersurface of field(point, normal, sigmas) with the
/// induced area element.
using SurfaceField =
    std::function<double(std::span<const double> point, std::span<const double> normal, const SigmaCurvatures&)>;
double integrate_surface(const HypersurfaceSpec& spec, const QuadratureRule& rule, const SurfaceField& field,
                         Execution exec = Execution::Parallel);

/// Integral of sigma_k (k = 0 gives the area).
double integrate_sigma(const HypersurfaceSpec& spec, int k, const QuadratureRule& rule,
                       Execution exec = Execution::Parallel);
double area(const HypersurfaceSpec& spec, const QuadratureRule& rule, Execution exec = Execution::Parallel);

struct AfCheck {
  double lhs = 0.0;     // 3 c2(n) * integral of sigma3
  double rhs = 0.0;     // (|Sigma| / w_{n-1})^{(n-4)/(n-1)} / 4
  double margin = 0.0;  // lhs - rhs
};

/// Both sides of the Alexandrov-Fenchel type bound. Needs n >= 5.
AfCheck af_check(const HypersurfaceSpec& spec, const QuadratureRule& rule, Execution exec = Execution::Parallel);

enum class PenroseMode { Gbc, Egb };

struct PenroseBound {
  double combined = 0.0;       // bound evaluated at the total area
  double per_component = 0.0;  // sum of the bound over the components
};

/// GBC: (A / w)^{(n-4)/(n-1)} / 4.
/// EGB: (A / w)^{(n-2)/(n-1)} / 2 + (alpha/2)(n-2)(n-3)(A / w)^{(n-4)/(n-1)}.
PenroseBound penrose_rhs(std::span<const double> areas, int n, PenroseMode mode, double alpha = 0.0);

/// How |Df|^2 behaves on the boundary hypersurface.
/// Horizon: |Df|^2 is infinite there. Field: s(x) at boundary points.
struct BoundaryS {
  std::function<double(std::span<const double> x)> field;  // empty means infinite (horizon)
};

enum class BoundaryMode { Gbc, Egb, P1 };

/// Gbc: 3 c2(n) int (s/(1+s))^2 sigma3.
/// Egb: (1/(2(n-1) w)) int (s/(1+s) sigma1 + 6 alpha (s/(1+s))^2 sigma3).
/// P1 is Egb with alpha = 0. With s infinite the factors are 1.
double boundary_term(const HypersurfaceSpec& spec, const QuadratureRule& rule, BoundaryMode mode, const BoundaryS& s,
                     double alpha = 0.0, Execution exec = Execution::Parallel);

/// H / sqrt(1 + s); 0 when s is infinite.
double graph_mean_curvature(double H, double s);

struct HorizonReport {
  int n = 0;
  int level = 0;
  double area = 0.0;
  double int_sigma1 = 0.0;
  double int_sigma2 = 0.0;
  double int_sigma3 = 0.0;
  double min_sigma1 = 0.0;
  double min_sigma2 = 0.0;
  double min_sigma3 = 0.0;
  double min_kappa = 0.0;
  bool three_convex = false;
  std::optional<AfCheck> af;       // n >= 5
  double penrose_gbc = 0.0;        // n >= 5
  double penrose_egb = 0.0;
  double boundary_gbc = 0.0;       // horizon boundary term, n >= 5
  double boundary_egb = 0.0;       // horizon boundary term at alpha
  double alpha = 0.0;
};

/// All per-node data in one sweep.
HorizonReport horizon_report(const HypersurfaceSpec& spec, const QuadratureRule& rule, double alpha = 0.0,
                             Execution exec = Execution::Parallel);

}  // namespace gbclab
