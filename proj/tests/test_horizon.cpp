#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gbclab/error.hpp"
#include "gbclab/horizon.hpp"
#include "gbclab/integration.hpp"

using namespace gbclab;
using doctest::Approx;

namespace {

const char* kEllipsoid5 = "1/sqrt(u1^2/1.1^2 + u2^2 + u3^2/0.95^2 + u4^2 + u5^2)";
const char* kBump5 = "1 + 0.05*(u1^2 - 0.2)";

}  // namespace

TEST_SUITE("horizon") {
  TEST_CASE("round sphere curvatures") {
    for (double rho : {1.0, 2.0, 0.5}) {
      const auto spec = parse_hypersurface(std::to_string(rho), 5);
      const double th[] = {0.7, 1.1, 2.0, 4.0};
      const auto forms = fundamental_forms(spec, th);
      const auto s = sigma_curvatures(forms);
      for (double k : s.kappa) CHECK(k == Approx(1.0 / rho));
      CHECK(s.sigma1 == Approx(4.0 / rho));
      CHECK(s.sigma2 == Approx(6.0 / (rho * rho)));
      CHECK(s.sigma3 == Approx(4.0 / (rho * rho * rho)));
      double dot = 0.0;
      for (int i = 0; i < 5; ++i) dot += forms.normal[i] * forms.point[i];
      CHECK(dot == Approx(rho));
    }
  }

  TEST_CASE("sphere of radius 2: area and sigma3 integral") {
    const auto spec = parse_hypersurface("2", 5);
    const auto rule = sphere_rule(5, 4);
    const double w4 = sphere_area(5);
    CHECK(area(spec, rule) == Approx(16.0 * w4).epsilon(1e-13));
    CHECK(integrate_sigma(spec, 3, rule) == Approx(8.0 * w4).epsilon(1e-13));
  }

  TEST_CASE("sigma values match the characteristic polynomial") {
    const auto spec = parse_hypersurface(kEllipsoid5, 5);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> polar(0.3, 2.8), az(0.0, 6.2);
    for (int t = 0; t < 20; ++t) {
      const double th[] = {polar(rng), polar(rng), polar(rng), az(rng)};
      const auto forms = fundamental_forms(spec, th);
      const auto s = sigma_curvatures(forms);
      // Newton identities on power sums of I^{-1} II.
      const Matrix M = forms.first.inverse() * forms.second;
      const double p1 = M.trace(), p2 = (M * M).trace(), p3 = (M * M * M).trace();
      const double e1 = p1, e2 = 0.5 * (e1 * p1 - p2), e3 = (e2 * p1 - e1 * p2 + p3) / 3.0;
      CHECK(s.sigma1 == Approx(e1).epsilon(1e-12));
      CHECK(s.sigma2 == Approx(e2).epsilon(1e-12));
      CHECK(s.sigma3 == Approx(e3).epsilon(1e-12));
      CHECK(elementary_symmetric(s.kappa, 3) == Approx(e3).epsilon(1e-12));
    }
    const double v[] = {1, 2, 3, 4};
    CHECK(elementary_symmetric(v, 0) == 1.0);
    CHECK(elementary_symmetric(v, 2) == 35.0);
    CHECK(elementary_symmetric(v, 4) == 24.0);
  }

  TEST_CASE("second fundamental form matches differences of the normal") {
    const auto spec = parse_hypersurface(kEllipsoid5, 5);
    const std::vector<double> th{0.9, 1.3, 2.1, 1.7};
    const auto c = fundamental_forms(spec, th);
    auto err = [&](double h) {
      double e = 0.0;
      for (int b = 0; b < 4; ++b) {
        auto tp = th, tm = th;
        tp[b] += h;
        tm[b] -= h;
        const auto np = fundamental_forms(spec, tp).normal, nm = fundamental_forms(spec, tm).normal;
        // X_a . dN/db, with X_a recovered from the metric: use points at +-h as well.
        for (int a = 0; a < 4; ++a) {
          auto ap = th, am = th;
          ap[a] += 1e-6;
          am[a] -= 1e-6;
          const auto xp = fundamental_forms(spec, ap).point, xm = fundamental_forms(spec, am).point;
          double v = 0.0;
          for (int i = 0; i < 5; ++i) v += (xp[i] - xm[i]) / 2e-6 * (np[i] - nm[i]) / (2 * h);
          e = std::max(e, std::abs(v - c.second(a, b)));
        }
      }
      return e;
    };
    const double e1 = err(1e-2), e2 = err(5e-3);
    CHECK(e1 < 1e-3);
    CHECK(e1 / e2 == Approx(4.0).epsilon(0.15));
  }

  TEST_CASE("a dimple produces a negative principal curvature") {
    const auto spec = parse_hypersurface("1 - 0.4*exp(-3*(1 - u1))", 5);
    const auto r = horizon_report(spec, sphere_rule(5, 10));
    CHECK(r.min_kappa < 0.0);
    CHECK_FALSE(r.three_convex);
    const auto round = horizon_report(parse_hypersurface("1", 5), sphere_rule(5, 3));
    CHECK(round.three_convex);
  }

  TEST_CASE("perturbed sphere integrals are stable under refinement") {
    const auto spec = parse_hypersurface(kBump5, 5);
    for (int k = 0; k <= 3; ++k)
      CHECK(integrate_sigma(spec, k, sphere_rule(5, 10)) ==
            Approx(integrate_sigma(spec, k, sphere_rule(5, 14))).epsilon(1e-8));
  }

  TEST_CASE("integrals are invariant under rotating the surface") {
    const auto a = parse_hypersurface("(1 + 0.1*u1^2)^(-0.5)", 4);
    const auto b = parse_hypersurface("(1 + 0.1*((u1 + u2)/sqrt(2))^2)^(-0.5)", 4);
    const auto rule = sphere_rule(4, 14);
    for (int k = 0; k <= 3; ++k) CHECK(integrate_sigma(a, k, rule) == Approx(integrate_sigma(b, k, rule)).epsilon(1e-8));
  }

  TEST_CASE("Alexandrov-Fenchel equality on round spheres") {
    for (int n : {5, 6, 7})
      for (double rho : {1.0, 2.0}) {
        const auto af = af_check(parse_hypersurface(std::to_string(rho), n), sphere_rule(n, 3));
        const double expected = 0.25 * std::pow(rho, n - 4);
        CHECK(af.lhs == Approx(expected).epsilon(1e-12));
        CHECK(af.rhs == Approx(expected).epsilon(1e-12));
        CHECK(std::abs(af.margin) <= 1e-10);
      }
  }

  TEST_CASE("Alexandrov-Fenchel strict on non-round convex surfaces") {
    CHECK(af_check(parse_hypersurface(kEllipsoid5, 5), sphere_rule(5, 10)).margin > 0.0);
    CHECK(af_check(parse_hypersurface(kBump5, 5), sphere_rule(5, 8)).margin > 0.0);
    CHECK_THROWS_AS(af_check(parse_hypersurface("1", 4), sphere_rule(4, 2)), DimensionError);
  }

  TEST_CASE("Penrose bounds") {
    const double w4 = sphere_area(5);
    const double one[] = {w4};
    CHECK(penrose_rhs(one, 5, PenroseMode::Gbc).combined == Approx(0.25));
    const double two[] = {w4, w4};
    const auto b = penrose_rhs(two, 5, PenroseMode::Gbc);
    CHECK(b.per_component == Approx(0.5));
    CHECK(b.combined == Approx(0.25 * std::pow(2.0, 0.25)));
    const double big[] = {16 * w4};
    CHECK(penrose_rhs(big, 5, PenroseMode::Egb, 0.0).combined == Approx(0.5 * 8.0));
  }

  TEST_CASE("Penrose bound is superadditive over components") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> a(0.01, 50.0);
    for (int t = 0; t < 100; ++t) {
      std::vector<double> areas(2 + t % 4);
      for (auto& v : areas) v = a(rng);
      for (int n : {5, 6, 8}) {
        const auto b = penrose_rhs(areas, n, PenroseMode::Gbc);
        CHECK(b.per_component >= b.combined);
        const auto e = penrose_rhs(areas, n, PenroseMode::Egb, 0.5);
        CHECK(e.per_component >= e.combined);
      }
    }
  }

  TEST_CASE("boundary terms on spheres") {
    const auto unit = parse_hypersurface("1", 5);
    const auto rule = sphere_rule(5, 3);
    CHECK(boundary_term(unit, rule, BoundaryMode::Gbc, {}) == Approx(0.25).epsilon(1e-13));
    BoundaryS three{[](std::span<const double>) { return 3.0; }};
    CHECK(boundary_term(unit, rule, BoundaryMode::Gbc, three) == Approx(9.0 / 64.0).epsilon(1e-13));
    for (double rho : {1.0, 2.0, 3.0}) {
      const auto s = parse_hypersurface(std::to_string(rho), 5);
      const double a = area(s, rule);
      CHECK(boundary_term(s, rule, BoundaryMode::Egb, {}, 0.0) == Approx(0.5 * rho * rho * rho).epsilon(1e-12));
      CHECK(boundary_term(s, rule, BoundaryMode::Egb, {}, 0.0) ==
            Approx(0.5 * std::pow(a / sphere_area(5), 0.75)).epsilon(1e-12));
      CHECK(boundary_term(s, rule, BoundaryMode::P1, {}) == Approx(0.5 * rho * rho * rho).epsilon(1e-12));
    }
    const auto r = horizon_report(unit, rule, 0.3);
    CHECK(r.boundary_gbc == Approx(0.25));
    CHECK(r.boundary_egb == Approx(r.penrose_egb).epsilon(1e-12));
  }

  TEST_CASE("graph mean curvature") {
    CHECK(graph_mean_curvature(2.0, 3.0) == Approx(1.0));
    CHECK(graph_mean_curvature(2.0, std::numeric_limits<double>::infinity()) == 0.0);
  }

  TEST_CASE("chart poles and invalid radii") {
    const auto spec = parse_hypersurface("1", 4);
    const double pole[] = {0.0, 1.0, 1.0};
    CHECK_THROWS_AS(fundamental_forms(spec, pole), DegenerateChart);
    const double u[] = {1, 0, 0, 0};
    CHECK_THROWS_AS(radius_at(parse_hypersurface("u1 - 2", 4), u), DomainError);
    CHECK_THROWS_AS(parse_hypersurface("x1", 4), Error);
  }

  TEST_CASE("serial and parallel reports agree bit for bit") {
    const auto spec = parse_hypersurface(kEllipsoid5, 5);
    const auto rule = sphere_rule(5, 5);
    const auto a = horizon_report(spec, rule, 0.2, Execution::Serial);
    const auto b = horizon_report(spec, rule, 0.2, Execution::Parallel);
    CHECK(a.area == b.area);
    CHECK(a.int_sigma3 == b.int_sigma3);
    CHECK(a.boundary_egb == b.boundary_egb);
  }
}
