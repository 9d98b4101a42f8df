#include <cmath>
#include <random>

#include "doctest.h"
#include "gbclab/error.hpp"
#include "gbclab/geometry.hpp"
#include "support.hpp"

using namespace gbclab;
using doctest::Approx;

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Riemann tensor straight from second derivatives: U^{ab}(f_ik^a f_jl^b - f_il^a f_jk^b).
Tensor4 naive_riemann(const MapJet3& j) {
  const int n = j.n, m = j.m;
  Matrix U = Matrix::Identity(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int i = 0; i < n; ++i) U(a, b) += j.d1(a, i) * j.d1(b, i);
  const Matrix Ui = U.inverse();
  Tensor4 r(n);
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
              s += Ui(a, b) * (j.d2(a, i, k) * j.d2(b, jj, l) - j.d2(a, i, l) * j.d2(b, jj, k));
          r(i, jj, k, l) = s;
        }
  return r;
}

const MapSpec& generic() {
  static const MapSpec m = parse_map(testing::kGenericM2, 5, 2);
  return m;
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("constant map is flat") {
    const MapSpec map = parse_map("3; -1", 4, 2);
    const double x[] = {0.1, 0.2, 0.3, 0.4};
    const PointGeometry pg = geometry_at(map, x);
    CHECK((pg.fo.g - Matrix::Identity(4, 4)).norm() == 0.0);
    CHECK((pg.fo.U - Matrix::Identity(2, 2)).norm() == 0.0);
    CHECK(pg.fo.sqrtG == 1.0);
    CHECK(max_abs(pg.fo.gamma.data()) == 0.0);
    CHECK(max_abs(pg.cd.riem_dddd.data()) == 0.0);
    CHECK(max_abs(pg.cd.P2.data()) == 0.0);
    CHECK(pg.cd.L2 == 0.0);
    CHECK(pg.cd.L2perp == 0.0);
    CHECK(pg.cd.flux1.norm() == 0.0);
    CHECK(pg.cd.flux2.norm() == 0.0);
  }

  TEST_CASE("linear graph in two variables") {
    const MapSpec map = parse_map("x1 + 2*x2", 2, 1);
    const double x[] = {0.3, -0.7};
    const PointGeometry pg = geometry_at(map, x);
    CHECK(pg.fo.g(0, 0) == Approx(2.0));
    CHECK(pg.fo.g(0, 1) == Approx(2.0));
    CHECK(pg.fo.g(1, 1) == Approx(5.0));
    CHECK(pg.fo.sqrtG == Approx(std::sqrt(6.0)));
    CHECK(pg.cd.scalar == 0.0);
    CHECK(max_abs(pg.cd.riem_dddd.data()) == 0.0);
    // P1 at a flat point is the (g^ik g^jl - g^il g^jk)/2 pattern.
    CHECK(pg.cd.P1(0, 1, 0, 1) == Approx(0.5 * (pg.fo.ginv(0, 0) * pg.fo.ginv(1, 1) - pg.fo.ginv(0, 1) * pg.fo.ginv(0, 1))));
  }

  TEST_CASE("paraboloid at its vertex has constant curvature data") {
    const MapSpec map = parse_map("0.5*(x1^2+x2^2+x3^2+x4^2+x5^2)", 5, 1);
    const double x[] = {0, 0, 0, 0, 0};
    const PointGeometry pg = geometry_at(map, x);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        for (int k = 0; k < 5; ++k)
          for (int l = 0; l < 5; ++l)
            CHECK(pg.cd.riem_dddd(i, j, k, l) == Approx((i == k) * (j == l) - (i == l) * (j == k)));
    CHECK(pg.cd.scalar == Approx(20.0));
    CHECK(pg.cd.L2 == Approx(120.0));
    CHECK(l2_via_second_derivatives(pg.cd, pg.fo) == Approx(120.0));
    CHECK(contract(pg.cd.P2, pg.cd.riem_dddd) == Approx(120.0));
  }

  TEST_CASE("closed-form inverse metric on random quadratic maps") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    for (int t = 0; t < 20; ++t) {
      std::string src;
      for (int a = 0; a < 2; ++a) {
        if (a) src += "; ";
        src += std::to_string(c(rng));
        for (int i = 1; i <= 5; ++i) {
          src += " + " + std::to_string(c(rng)) + "*x" + std::to_string(i);
          for (int j = i; j <= 5; ++j) src += " + " + std::to_string(c(rng)) + "*x" + std::to_string(i) + "*x" + std::to_string(j);
        }
      }
      const MapSpec map = parse_map(src, 5, 2);
      const auto x = testing::random_point(rng, 5);
      const FirstOrderData fo = first_order(eval_jet3(map, x));
      const Matrix inv = fo.g.inverse();
      CHECK((fo.ginv_closed - inv).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, inv.cwiseAbs().maxCoeff()));
      CHECK(fo.inverse_mismatch <= 1e-12);
      CHECK(fo.u_relation_mismatch <= 1e-12);
    }
  }

  TEST_CASE("Riemann and P tensors match naive formulas and have curvature symmetries") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 10; ++t) {
      const auto x = testing::random_point(rng, 5);
      const PointGeometry pg = geometry_at(generic(), x);
      const Tensor4 naive = naive_riemann(pg.jet);
      const auto& R = pg.cd.riem_dddd;
      const auto& P = pg.cd.P2;
      const double rs = max_abs(R.data()), ps = max_abs(P.data());
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
          for (int k = 0; k < 5; ++k)
            for (int l = 0; l < 5; ++l) {
              CHECK(std::abs(R(i, j, k, l) - naive(i, j, k, l)) <= 1e-12 * rs);
              CHECK(std::abs(R(i, j, k, l) + R(j, i, k, l)) <= 1e-12 * rs);
              CHECK(std::abs(R(i, j, k, l) + R(i, j, l, k)) <= 1e-12 * rs);
              CHECK(std::abs(R(i, j, k, l) - R(k, l, i, j)) <= 1e-12 * rs);
              CHECK(std::abs(R(i, j, k, l) + R(j, k, i, l) + R(k, i, j, l)) <= 1e-12 * rs);
              CHECK(std::abs(P(i, j, k, l) - P(k, l, i, j)) <= 1e-12 * ps);
              CHECK(std::abs(P(i, j, k, l) + P(j, i, k, l)) <= 1e-12 * ps);
              CHECK(std::abs(P(i, j, k, l) + P(i, j, l, k)) <= 1e-12 * ps);
            }
    }
  }

  TEST_CASE("L2 equals the Gauss-Bonnet quadratic |Rm|^2 - 4|Ric|^2 + R^2") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 10; ++t) {
      const auto x = testing::random_point(rng, 5);
      const PointGeometry pg = geometry_at(generic(), x);
      const auto& cd = pg.cd;
      double rm = 0.0, ric = 0.0;
      for (std::size_t q = 0; q < cd.riem_dddd.data().size(); ++q) rm += cd.riem_dddd.data()[q] * cd.riem_uuuu.data()[q];
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) ric += cd.ric_dd(i, j) * cd.ric_uu(i, j);
      const double expected = rm - 4.0 * ric + cd.scalar * cd.scalar;
      CHECK(cd.L2 == Approx(expected).epsilon(1e-10));
      CHECK(l2_via_second_derivatives(cd, pg.fo) == Approx(cd.L2).epsilon(1e-10));
    }
  }

  TEST_CASE("flux vectors match naive contractions") {
    std::mt19937_64 rng(10);
    const auto x = testing::random_point(rng, 5);
    const PointGeometry pg = geometry_at(generic(), x);
    const auto& j = pg.jet;
    for (int i = 0; i < 5; ++i) {
      double f1 = 0.0, f2 = 0.0;
      for (int jj = 0; jj < 5; ++jj)
        for (int k = 0; k < 5; ++k)
          for (int l = 0; l < 5; ++l) {
            double dg = 0.0;
            for (int a = 0; a < 2; ++a) dg += j.d2(a, jj, l) * j.d1(a, k) + j.d1(a, jj) * j.d2(a, k, l);
            f1 += pg.cd.P1(i, jj, k, l) * dg;
            f2 += pg.cd.P2(i, jj, k, l) * dg;
          }
      CHECK(pg.cd.flux1(i) == Approx(f1).epsilon(1e-12));
      CHECK(pg.cd.flux2(i) == Approx(f2).epsilon(1e-12));
    }
  }

  TEST_CASE("normal curvature scalar matches a brute-force double sum") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 5; ++t) {
      const auto x = testing::random_point(rng, 5);
      const PointGeometry pg = geometry_at(generic(), x);
      const auto& j = pg.jet;
      const int n = 5, m = 2;
      const Matrix gi = pg.fo.g.inverse();
      std::vector<Matrix> A(m);
      std::vector<Vector> grad(m);
      for (int a = 0; a < m; ++a) {
        Matrix h(n, n);
        for (int i = 0; i < n; ++i)
          for (int k = 0; k < n; ++k) h(i, k) = j.d2(a, i, k);
        A[a] = gi * h;
        grad[a] = Vector::Zero(n);
        for (int b = 0; b < m; ++b)
          for (int i = 0; i < n; ++i) grad[a](i) += pg.fo.Uinv(a, b) * j.d1(b, i);
      }
      double s = 0.0;
      for (int a = 0; a < m; ++a)
        for (int c = 0; c < m; ++c) {
          const Matrix rp = A[c] * A[a] - A[a] * A[c];
          for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
              for (int l = 0; l < n; ++l) s += pg.fo.g(i, k) * rp(i, l) * grad[a](l) * grad[c](k);
        }
      CHECK(pg.cd.RperpScalar == Approx(s).epsilon(1e-10).scale(1e-12));
      // Antisymmetry of the normal curvature operators.
      for (int a = 0; a < m; ++a)
        for (int c = 0; c < m; ++c) {
          CHECK((pg.cd.rperp(a, c) + pg.cd.rperp(c, a)).norm() <= 1e-12 * (1.0 + pg.cd.rperp(a, c).norm()));
          const Matrix lowered = pg.fo.g * pg.cd.rperp(a, c);
          CHECK((lowered + lowered.transpose()).norm() <= 1e-12 * (1.0 + lowered.norm()));
        }
    }
  }

  TEST_CASE("commutation identity for shape and Ricci operators") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 20; ++t) {
      const auto x = testing::random_point(rng, 5, -2.0, 2.0);
      const PointGeometry pg = geometry_at(generic(), x);
      for (int a = 0; a < 2; ++a) {
        const Matrix& A = pg.cd.A[a];
        const Matrix& Rc = pg.cd.Rc;
        const Matrix& T = pg.cd.Tperp[a];
        const double lhs = (A * Rc - Rc * A - T).norm();
        CHECK(lhs <= 1e-10 * (A.norm() * Rc.norm() + T.norm()));
      }
    }
  }

  TEST_CASE("dual routes for L2 and L2perp agree on the generic map") {
    std::mt19937_64 rng(14);
    for (int t = 0; t < 50; ++t) {
      const auto x = testing::random_point(rng, 5, -2.0, 2.0);
      PointGeometry pg;
      REQUIRE_NOTHROW(pg = geometry_at(generic(), x));
      double s1 = 0.0, s2 = 0.0;
      const double op = l2_perp_operator(pg.cd, pg.fo, &s1);
      const double ct = l2_perp_contraction(pg.jet, pg.fo, pg.cd, &s2);
      CHECK(std::abs(op - ct) <= 1e-9 * std::max({std::abs(op), std::abs(ct), 1e-300}));
      CHECK(std::abs(pg.cd.L2 - l2_via_second_derivatives(pg.cd, pg.fo)) <= 1e-10 * std::abs(pg.cd.L2));
    }
  }

  TEST_CASE("codimension one: every normal-bundle quantity vanishes") {
    const MapSpec map = parse_map(testing::kRadialM1, 5, 1);
    const double x[] = {0.4, -0.3, 1.1, 0.2, -0.8};
    const PointGeometry pg = geometry_at(map, x);
    CHECK(pg.cd.L2perp == 0.0);
    CHECK(pg.cd.RperpScalar == 0.0);
    CHECK(pg.cd.rperp(0, 0).norm() == 0.0);
    CHECK(pg.cd.Tperp[0].norm() <= 1e-14 * (1.0 + pg.cd.A[0].norm() * pg.cd.Rc.norm()));
    CHECK(l2_perp_contraction(pg.jet, pg.fo, pg.cd) == 0.0);
  }

  TEST_CASE("proportional components have a flat normal bundle") {
    const MapSpec map = parse_map(testing::kFlatNormalM2, 5, 2);
    std::mt19937_64 rng(15);
    for (int t = 0; t < 10; ++t) {
      const auto x = testing::random_point(rng, 5, -2.0, 2.0);
      const PointGeometry pg = geometry_at(map, x);
      const double scale = 1.0 + pg.cd.A[0].squaredNorm() + pg.cd.A[1].squaredNorm();
      CHECK(pg.cd.rperp(0, 1).norm() <= 1e-12 * scale);
      CHECK(std::abs(pg.cd.L2perp) <= 1e-10 * (1.0 + std::abs(pg.cd.L2)));
      CHECK(std::abs(pg.cd.RperpScalar) <= 1e-12 * scale);
    }
  }

  TEST_CASE("P2 is divergence free") {
    // nabla_i P^{ijkl} from central differences of P plus Christoffel terms, at h and h/2.
    const MapSpec& map = generic();
    const std::vector<double> x{0.3, -0.5, 0.7, 0.2, -0.4};
    const int n = 5;
    auto divergence_norm = [&](double h) {
      const PointGeometry c = geometry_at(map, x);
      std::vector<Tensor4> dP;
      for (int s = 0; s < n; ++s) {
        auto xp = x, xm = x;
        xp[s] += h;
        xm[s] -= h;
        const auto pp = geometry_at(map, xp).cd.P2, pm = geometry_at(map, xm).cd.P2;
        Tensor4 d(n);
        for (std::size_t q = 0; q < d.data().size(); ++q) d.data()[q] = (pp.data()[q] - pm.data()[q]) / (2 * h);
        dP.push_back(d);
      }
      const auto& P = c.cd.P2;
      const auto& G = c.fo.gamma;  // G(i, s, k) = Gamma_is^k
      double norm = 0.0;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double v = 0.0;
            for (int i = 0; i < n; ++i) {
              v += dP[i](i, j, k, l);
              for (int s = 0; s < n; ++s)
                v += G(i, s, i) * P(s, j, k, l) + G(i, s, j) * P(i, s, k, l) + G(i, s, k) * P(i, j, s, l) +
                     G(i, s, l) * P(i, j, k, s);
            }
            norm = std::max(norm, std::abs(v));
          }
      return norm;
    };
    const double e1 = divergence_norm(1e-3), e2 = divergence_norm(5e-4);
    CHECK(e1 < 1e-4);
    CHECK(e1 / e2 == Approx(4.0).epsilon(0.2));
  }
}
