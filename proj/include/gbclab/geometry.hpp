#pragma once

#include <span>
#include <vector>

#include "gbclab/expr.hpp"
#include "gbclab/tensor.hpp"

namespace gbclab {

/// Metric-level data of the graph {(x, f(x))} at one point.
struct FirstOrderData {
  int n = 0;
  int m = 0;
  Matrix df;                  // df(a, i) = f_i^a
  std::vector<Matrix> hess;   // hess[a](i, j) = f_ij^a
  Matrix g;                   // delta_ij + f_i^a f_j^a
  Matrix ginv;                // by Cholesky
  Matrix ginv_closed;         // delta_ij - f_i^a f_j^b U^{ab}
  Matrix U;                   // delta_ab + <Df^a, Df^b>
  Matrix Uinv;
  double sqrtG = 1.0;
  Tensor3 gamma;              // gamma(i, j, k) = Gamma_ij^k
  Tensor3 dg;                 // dg(l, j, k) = d_l g_jk
  /// max |ginv - ginv_closed| / max(1, |ginv|)
  double inverse_mismatch = 0.0;
  /// max |delta - Uinv - Uinv <Df, Df>|
  double u_relation_mismatch = 0.0;
};

/// Curvature and normal-bundle data; all rank-4 arrays are dense.
struct CurvatureData {
  Tensor4 riem_dddd;              // R_ijkl, R_ijij > 0 on round spheres
  Tensor4 riem_uuuu;              // R^ijkl
  Matrix ric_dd;                  // R_jl = g^{ik} R_ijkl
  Matrix ric_uu;                  // R^jl
  double scalar = 0.0;            // R
  std::vector<Matrix> A;          // shape operators: A[a](j, i) = f_ik^a g^{kj}
  std::vector<Matrix> Rperp;      // Rperp[a*m + b] = A^b A^a - A^a A^b
  Matrix Rc;                      // Ricci operator g^{-1} Ric
  std::vector<Matrix> Tperp;      // right side of the A^a Rc - Rc A^a commutation identity
  std::vector<Vector> grad;       // grad[a] = components of nabla f^a = U^{ag} f_i^g
  Tensor4 P1;                     // (g^ik g^jl - g^il g^jk) / 2
  Tensor4 P2;                     // Gauss-Bonnet P tensor, all indices up
  double L2 = 0.0;
  double L2perp = 0.0;
  double RperpScalar = 0.0;
  Vector flux1;                   // P1^{ijkl} d_l g_jk
  Vector flux2;                   // P2^{ijkl} d_l g_jk

  const Matrix& rperp(int a, int b) const { return Rperp[a * static_cast<int>(A.size()) + b]; }
};

FirstOrderData first_order(const MapJet3& jet);

/// Riemann, Ricci, scalar curvature, shape/normal operators, Rc, T-perp, gradients.
CurvatureData curvature(const MapJet3& jet, const FirstOrderData& fo);

/// Fills P1 and P2.
void p_tensors(CurvatureData& cd, const FirstOrderData& fo);

/// Second independent route to L2: 2 P^{ijkl} U^{ab} f_ik^a f_jl^b.
double l2_via_second_derivatives(const CurvatureData& cd, const FirstOrderData& fo);

/// L2 = P^{ijkl} R_ijkl, cross-checked against l2_via_second_derivatives().
/// Throws PathMismatch beyond 1e-10 relative to the summed term magnitudes.
double gauss_bonnet_l2(const CurvatureData& cd, const FirstOrderData& fo);

/// L2-perp assembled from shape, normal-curvature, Ricci and T-perp operators.
/// `scale` receives the summed magnitude of the individual terms.
double l2_perp_operator(const CurvatureData& cd, const FirstOrderData& fo, double* scale = nullptr);

/// L2-perp as 2 P^{ijkl} T_ijkl with
/// T_ijkl = U^{bg} f_s^b f_k^a (f_js^g f_il^a - f_il^g f_js^a).
double l2_perp_contraction(const MapJet3& jet, const FirstOrderData& fo, const CurvatureData& cd,
                           double* scale = nullptr);

/// Operator route, cross-checked against the contraction route (1e-9 relative).
double l2_perp(const MapJet3& jet, const FirstOrderData& fo, const CurvatureData& cd);

/// <R-perp_{ag}(nabla f^a), nabla f^g>.
double r_perp_scalar(const CurvatureData& cd, const FirstOrderData& fo);

/// F_1^i = P1^{ijkl} d_l g_jk and F_2^i = P2^{ijkl} d_l g_jk.
void flux_vectors(CurvatureData& cd, const FirstOrderData& fo);

/// (d_i g_ij - d_j g_ii), the classical ADM integrand before contraction with nu_j.
Vector adm_raw_vector(const FirstOrderData& fo);

struct GeometryOptions {
  bool normal_terms = true;   // compute L2perp and RperpScalar
  bool verify_paths = true;   // throw PathMismatch on dual-route disagreement
};

struct PointGeometry {
  MapJet3 jet;
  FirstOrderData fo;
  CurvatureData cd;
};

/// Full pipeline at one point.
PointGeometry geometry_at(const MapSpec& map, std::span<const double> x, const GeometryOptions& opts = {});

}  // namespace gbclab
