#include "gbclab/geometry.hpp"

#include <cmath>
#include <string>

#include "gbclab/error.hpp"

namespace gbclab {

double contract(const Tensor4& a, const Tensor4& b) {
  double s = 0.0;
  const auto& x = a.data();
  const auto& y = b.data();
  for (std::size_t t = 0; t < x.size(); ++t) s += x[t] * y[t];
  return s;
}

double contract_abs(const Tensor4& a, const Tensor4& b) {
  double s = 0.0;
  const auto& x = a.data();
  const auto& y = b.data();
  for (std::size_t t = 0; t < x.size(); ++t) s += std::abs(x[t] * y[t]);
  return s;
}

Tensor4 raise_all(const Tensor4& lower, const Matrix& ginv) {
  const int n = lower.dim();
  Tensor4 a = lower, b(n);
  // Raise one slot per pass; the raised slot is cycled to the back so every
  // pass contracts the leading index.
  for (int pass = 0; pass < 4; ++pass) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double s = 0.0;
            for (int p = 0; p < n; ++p) s += ginv(l, p) * a(p, i, j, k);
            b(i, j, k, l) = s;
          }
    std::swap(a, b);
  }
  return a;
}

namespace {

double inner(const Matrix& g, const Vector& x, const Vector& y) { return x.dot(g * y); }

void check_finite(const Matrix& mtx, const char* what) {
  if (!mtx.allFinite()) throw SingularMatrix(std::string("non-finite entries in ") + what);
}

}  // namespace

FirstOrderData first_order(const MapJet3& jet) {
  const int n = jet.n, m = jet.m;
  if (n > kMaxDim || m > kMaxDim)
    throw DimensionError("dimensions above " + std::to_string(kMaxDim) + " are not supported");
  FirstOrderData fo;
  fo.n = n;
  fo.m = m;
  fo.df.resize(m, n);
  fo.hess.assign(m, Matrix(n, n));
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i) {
      fo.df(a, i) = jet.d1(a, i);
      for (int j = 0; j < n; ++j) fo.hess[a](i, j) = jet.d2(a, i, j);
    }
  check_finite(fo.df, "Df");

  fo.g = Matrix::Identity(n, n) + fo.df.transpose() * fo.df;
  fo.U = Matrix::Identity(m, m) + fo.df * fo.df.transpose();

  Eigen::LLT<Matrix> gl(fo.g);
  if (gl.info() != Eigen::Success) throw SingularMatrix("induced metric is not positive definite");
  fo.ginv = gl.solve(Matrix::Identity(n, n));
  Eigen::LLT<Matrix> ul(fo.U);
  if (ul.info() != Eigen::Success) throw SingularMatrix("normal Gram matrix U is not positive definite");
  fo.Uinv = ul.solve(Matrix::Identity(m, m));
  check_finite(fo.ginv, "g^-1");
  check_finite(fo.Uinv, "U^-1");

  double logdet = 0.0;
  for (int i = 0; i < n; ++i) logdet += std::log(gl.matrixL()(i, i));
  fo.sqrtG = std::exp(logdet);

  fo.ginv_closed = Matrix::Identity(n, n) - fo.df.transpose() * fo.Uinv * fo.df;
  fo.inverse_mismatch =
      (fo.ginv - fo.ginv_closed).cwiseAbs().maxCoeff() / std::max(1.0, fo.ginv.cwiseAbs().maxCoeff());
  const Matrix dd = fo.df * fo.df.transpose();
  fo.u_relation_mismatch = (Matrix::Identity(m, m) - fo.Uinv - fo.Uinv * dd).cwiseAbs().maxCoeff();

  // v(b, k) = U^{ab} f_k^a
  const Matrix v = fo.Uinv * fo.df;
  fo.gamma = Tensor3(n);
  fo.dg = Tensor3(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int b = 0; b < m; ++b) s += v(b, k) * fo.hess[b](i, j);
        fo.gamma(i, j, k) = s;
      }
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int a = 0; a < m; ++a) s += fo.hess[a](j, l) * fo.df(a, k) + fo.df(a, j) * fo.hess[a](k, l);
        fo.dg(l, j, k) = s;
      }
  return fo;
}

CurvatureData curvature(const MapJet3& jet, const FirstOrderData& fo) {
  (void)jet;
  const int n = fo.n, m = fo.m;
  CurvatureData cd;

  // W[b] = U^{ab} hess[a]
  std::vector<Matrix> W(m, Matrix::Zero(n, n));
  for (int b = 0; b < m; ++b)
    for (int a = 0; a < m; ++a) W[b] += fo.Uinv(a, b) * fo.hess[a];

  cd.riem_dddd = Tensor4(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int b = 0; b < m; ++b)
            s += W[b](i, k) * fo.hess[b](j, l) - W[b](i, l) * fo.hess[b](j, k);
          cd.riem_dddd(i, j, k, l) = s;
        }
  cd.riem_uuuu = raise_all(cd.riem_dddd, fo.ginv);

  cd.ric_dd = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) s += fo.ginv(i, k) * cd.riem_dddd(i, j, k, l);
      cd.ric_dd(j, l) = s;
    }
  cd.ric_uu = fo.ginv * cd.ric_dd * fo.ginv;
  cd.scalar = (fo.ginv.cwiseProduct(cd.ric_dd)).sum();

  cd.A.resize(m);
  for (int a = 0; a < m; ++a) cd.A[a] = fo.ginv * fo.hess[a];
  cd.Rperp.resize(static_cast<std::size_t>(m) * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) cd.Rperp[a * m + b] = cd.A[b] * cd.A[a] - cd.A[a] * cd.A[b];
  cd.Rc = fo.ginv * cd.ric_dd;

  std::vector<double> trA(m);
  for (int a = 0; a < m; ++a) trA[a] = cd.A[a].trace();
  cd.Tperp.assign(m, Matrix::Zero(n, n));
  for (int a = 0; a < m; ++a)
    for (int mu = 0; mu < m; ++mu)
      for (int nu = 0; nu < m; ++nu) {
        const double u = fo.Uinv(mu, nu);
        cd.Tperp[a] += u * (trA[mu] * cd.Rperp[nu * m + a] + cd.Rperp[a * m + mu] * cd.A[nu] +
                            cd.A[mu] * cd.Rperp[a * m + nu]);
      }

  cd.grad.assign(m, Vector::Zero(n));
  const Matrix v = fo.Uinv * fo.df;
  for (int a = 0; a < m; ++a) cd.grad[a] = v.row(a).transpose();
  return cd;
}

void p_tensors(CurvatureData& cd, const FirstOrderData& fo) {
  const int n = fo.n;
  const Matrix& gi = fo.ginv;
  const Matrix& Ru = cd.ric_uu;
  const double R = cd.scalar;
  cd.P1 = Tensor4(n);
  cd.P2 = Tensor4(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double d = gi(i, k) * gi(j, l) - gi(i, l) * gi(j, k);
          cd.P1(i, j, k, l) = 0.5 * d;
          cd.P2(i, j, k, l) = cd.riem_uuuu(i, j, k, l) + Ru(j, k) * gi(i, l) - Ru(j, l) * gi(i, k) -
                              Ru(i, k) * gi(j, l) + Ru(i, l) * gi(j, k) + 0.5 * R * d;
        }
}

double l2_via_second_derivatives(const CurvatureData& cd, const FirstOrderData& fo) {
  const int n = fo.n, m = fo.m;
  double s = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const double u = fo.Uinv(a, b);
      if (u == 0.0) continue;
      const Matrix& ha = fo.hess[a];
      const Matrix& hb = fo.hess[b];
      double t = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) t += cd.P2(i, j, k, l) * ha(i, k) * hb(j, l);
      s += u * t;
    }
  return 2.0 * s;
}

double gauss_bonnet_l2(const CurvatureData& cd, const FirstOrderData& fo) {
  const double direct = contract(cd.P2, cd.riem_dddd);
  const double other = l2_via_second_derivatives(cd, fo);
  const double scale = contract_abs(cd.P2, cd.riem_dddd);
  if (std::abs(direct - other) > 1e-10 * scale + 1e-300)
    throw PathMismatch("L2 routes disagree: " + std::to_string(direct) + " vs " + std::to_string(other));
  return direct;
}

double l2_perp_operator(const CurvatureData& cd, const FirstOrderData& fo, double* scale) {
  const int m = fo.m;
  const Matrix& g = fo.g;
  double half = 0.0, mag = 0.0;
  auto acc = [&](double v) {
    half += v;
    mag += std::abs(v);
  };
  for (int a = 0; a < m; ++a) {
    const Vector& va = cd.grad[a];
    const Vector Aa_va = cd.A[a] * va;
    const double trAa = cd.A[a].trace();
    for (int c = 0; c < m; ++c) {
      const Vector& vc = cd.grad[c];
      const Matrix& Rac = cd.rperp(a, c);
      const Vector Rac_va = Rac * va;
      for (int mu = 0; mu < m; ++mu)
        for (int nu = 0; nu < m; ++nu) {
          const double u = fo.Uinv(mu, nu);
          const Vector inner_vec = cd.A[nu] * Rac_va + cd.rperp(nu, c) * Aa_va - cd.rperp(nu, a) * (cd.A[c] * va);
          acc(u * inner(g, cd.A[mu] * inner_vec, vc));
          acc(u * (cd.A[a] * cd.A[mu]).trace() * inner(g, cd.rperp(c, nu) * va, vc));
        }
      acc(-2.0 * inner(g, cd.Rc * Rac_va, vc));
      acc(-inner(g, cd.Tperp[c] * Aa_va, vc));
      acc(-inner(g, cd.A[a] * (cd.Tperp[c] * va), vc));
      acc(trAa * inner(g, cd.Tperp[c] * va, vc));
      acc(0.5 * cd.scalar * inner(g, Rac_va, vc));
    }
  }
  if (scale) *scale = 2.0 * mag;
  return 2.0 * half;
}

double l2_perp_contraction(const MapJet3& jet, const FirstOrderData& fo, const CurvatureData& cd,
                           double* scale) {
  (void)jet;
  const int n = fo.n, m = fo.m;
  // av[c][a](j) = sum_s grad[c]_s f_js^a
  std::vector<std::vector<Vector>> av(m, std::vector<Vector>(m));
  for (int c = 0; c < m; ++c)
    for (int a = 0; a < m; ++a) av[c][a] = fo.hess[a] * cd.grad[c];
  // Tabs holds the magnitudes before the pairwise cancellation inside T; with a
  // flat normal bundle T itself is pure rounding and cannot serve as the scale.
  Tensor4 T(n), Tabs(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0, sa = 0.0;
          for (int a = 0; a < m; ++a) {
            double t = 0.0, ta = 0.0;
            for (int c = 0; c < m; ++c) {
              const double p = av[c][c](j) * fo.hess[a](i, l), q = fo.hess[c](i, l) * av[c][a](j);
              t += p - q;
              ta += std::abs(p) + std::abs(q);
            }
            s += fo.df(a, k) * t;
            sa += std::abs(fo.df(a, k)) * ta;
          }
          T(i, j, k, l) = s;
          Tabs(i, j, k, l) = sa;
        }
  if (scale) *scale = 2.0 * contract_abs(cd.P2, Tabs);
  return 2.0 * contract(cd.P2, T);
}

double l2_perp(const MapJet3& jet, const FirstOrderData& fo, const CurvatureData& cd) {
  double s1 = 0.0, s2 = 0.0;
  const double op = l2_perp_operator(cd, fo, &s1);
  const double ct = l2_perp_contraction(jet, fo, cd, &s2);
  if (std::abs(op - ct) > 1e-9 * (s1 + s2) + 1e-300)
    throw PathMismatch("L2perp routes disagree: operator " + std::to_string(op) + " vs contraction " +
                       std::to_string(ct));
  return op;
}

double r_perp_scalar(const CurvatureData& cd, const FirstOrderData& fo) {
  const int m = fo.m;
  double s = 0.0;
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c) s += inner(fo.g, cd.rperp(a, c) * cd.grad[a], cd.grad[c]);
  return s;
}

void flux_vectors(CurvatureData& cd, const FirstOrderData& fo) {
  const int n = fo.n;
  cd.flux1 = Vector::Zero(n);
  cd.flux2 = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    double s1 = 0.0, s2 = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double d = fo.dg(l, j, k);
          s1 += cd.P1(i, j, k, l) * d;
          s2 += cd.P2(i, j, k, l) * d;
        }
    cd.flux1(i) = s1;
    cd.flux2(i) = s2;
  }
}

Vector adm_raw_vector(const FirstOrderData& fo) {
  const int n = fo.n;
  Vector v = Vector::Zero(n);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += fo.dg(i, i, j) - fo.dg(j, i, i);
    v(j) = s;
  }
  return v;
}

PointGeometry geometry_at(const MapSpec& map, std::span<const double> x, const GeometryOptions& opts) {
  PointGeometry pg{eval_jet3(map, x), {}, {}};
  pg.fo = first_order(pg.jet);
  pg.cd = curvature(pg.jet, pg.fo);
  p_tensors(pg.cd, pg.fo);
  pg.cd.L2 = opts.verify_paths ? gauss_bonnet_l2(pg.cd, pg.fo) : contract(pg.cd.P2, pg.cd.riem_dddd);
  if (opts.normal_terms && map.m > 1) {
    pg.cd.L2perp = opts.verify_paths ? l2_perp(pg.jet, pg.fo, pg.cd) : l2_perp_operator(pg.cd, pg.fo);
    pg.cd.RperpScalar = r_perp_scalar(pg.cd, pg.fo);
  }
  flux_vectors(pg.cd, pg.fo);
  return pg;
}

}  // namespace gbclab
