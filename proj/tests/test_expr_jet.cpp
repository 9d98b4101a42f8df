#include <cmath>
#include <random>

#include "doctest.h"
#include "gbclab/error.hpp"
#include "gbclab/expr.hpp"
#include "gbclab/jet.hpp"
#include "support.hpp"

using namespace gbclab;
using doctest::Approx;

TEST_SUITE("expr_jet") {
  TEST_CASE("variable and constant jets") {
    const Jet x = Jet::variable(3, 1, 2.0);
    CHECK(x.value() == 2.0);
    CHECK(x.d1(1) == 1.0);
    CHECK(x.d1(0) == 0.0);
    CHECK(x.d2(1, 1) == 0.0);
    const Jet c = Jet::constant(3, 5.0);
    CHECK(c.d1(2) == 0.0);
  }

  TEST_CASE("product rule to third order") {
    // x^3 y at (2, 3).
    const Jet x = Jet::variable(2, 0, 2.0), y = Jet::variable(2, 1, 3.0);
    const Jet p = x * x * x * y;
    CHECK(p.value() == Approx(24.0));
    CHECK(p.d1(0) == Approx(36.0));
    CHECK(p.d1(1) == Approx(8.0));
    CHECK(p.d2(0, 0) == Approx(36.0));
    CHECK(p.d2(0, 1) == Approx(12.0));
    CHECK(p.d3(0, 0, 0) == Approx(18.0));
    CHECK(p.d3(0, 0, 1) == Approx(12.0));
    CHECK(p.d3(0, 1, 1) == Approx(0.0));
  }

  TEST_CASE("derivative arrays are symmetric") {
    std::mt19937_64 rng(3);
    const MapSpec map = parse_map("sin(x1*x2) + exp(x3)*atan(x1 - x2^2)/(2 + cos(x3))", 3, 1);
    for (int t = 0; t < 20; ++t) {
      const auto x = testing::random_point(rng, 3);
      const MapJet3 j = eval_jet3(map, x);
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) {
          CHECK(j.d2(0, i, k) == j.d2(0, k, i));
          for (int l = 0; l < 3; ++l) {
            CHECK(j.d3(0, i, k, l) == j.d3(0, k, i, l));
            CHECK(j.d3(0, i, k, l) == j.d3(0, l, k, i));
          }
        }
    }
  }

  TEST_CASE("sin(x1) jets agree with central differences") {
    std::mt19937_64 rng(11);
    const MapSpec map = parse_map("sin(x1)", 2, 1);
    for (int t = 0; t < 20; ++t) {
      const auto x = testing::random_point(rng, 2, -3.0, 3.0);
      const auto r = testing::fd_jet_check(map, x, 1e-3);
      CHECK_MESSAGE(r.ok, r.detail);
      const MapJet3 j = eval_jet3(map, x);
      CHECK(j.d3(0, 0, 0, 0) == Approx(-std::cos(x[0])).epsilon(1e-14));
    }
  }

  TEST_CASE("elementary function jets agree with central differences") {
    std::mt19937_64 rng(5);
    for (const char* src : {"exp(x1)*x2", "log(2 + x1*x1) - sqrt(3 + x2)", "tanh(x1 - x2)", "atan(x1*x2)",
                            "x1^2.5 + x2^-3", "(1 + x1^2)^x2", "pi*e*x1/(x2 + 4)"}) {
      const MapSpec map = parse_map(src, 2, 1);
      for (int t = 0; t < 10; ++t) {
        const auto x = testing::random_point(rng, 2, 0.5, 1.5);
        const auto r = testing::fd_jet_check(map, x, 1e-3);
        CHECK_MESSAGE(r.ok, src << ": " << r.detail);
      }
    }
  }

  TEST_CASE("precedence and associativity") {
    const double x[] = {2.0, 3.0};
    auto v = [&](const char* s) { return evaluate_value(*parse_expression(s, 2), x); };
    CHECK(v("1 + 2*3") == 7.0);
    CHECK(v("2^3^2") == 512.0);
    CHECK(v("-x1^2") == -4.0);
    CHECK(v("x2 - x1 - 1") == 0.0);
    CHECK(v("x2/x1/2") == Approx(0.75));
    CHECK(v("2*-x1") == -4.0);
    CHECK(v("1e-1*10") == Approx(1.0));
  }

  TEST_CASE("printing round-trips") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 200; ++t) {
      const std::string src = testing::random_expression(rng, 4, 4);
      const ExprPtr e = parse_expression(src, 4);
      const std::string once = to_string(*e);
      const ExprPtr again = parse_expression(once, 4);
      CHECK_MESSAGE(same_tree(*e, *again), src);
      CHECK(to_string(*again) == once);
    }
  }

  TEST_CASE("substitution") {
    const ExprPtr e = parse_expression("x1*x2 + sin(x1)", 2);
    const ExprPtr r[] = {parse_expression("u1 + 1", 1, 'u'), parse_expression("2", 1, 'u')};
    const ExprPtr s = substitute(e, r);
    const double u[] = {0.5};
    CHECK(evaluate_value(*s, u) == Approx(3.0 + std::sin(1.5)));
  }

  TEST_CASE("syntax errors carry offsets") {
    CHECK_THROWS_AS(parse_expression("1 +", 2), SyntaxError);
    CHECK_THROWS_AS(parse_expression("(x1", 2), SyntaxError);
    CHECK_THROWS_AS(parse_expression("x1 x2", 2), SyntaxError);
    CHECK_THROWS_AS(parse_expression("foo(x1)", 2), UnknownIdentifier);
    CHECK_THROWS_AS(parse_expression("x3", 2), UnknownIdentifier);
    CHECK_THROWS_AS(parse_expression("x0", 2), UnknownIdentifier);
    try {
      parse_map("x1; x1 +* x2", 2, 2);
      FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
      CHECK(e.position() >= 4);
    }
  }

  TEST_CASE("arity and dimension checks") {
    CHECK_THROWS_AS(parse_map("x1; x2", 2, 1), ArityMismatch);
    CHECK_THROWS_AS(parse_map("x1", 2, 2), ArityMismatch);
    CHECK_THROWS_AS(parse_map("x1", 0, 1), DimensionError);
    CHECK(parse_map("x1\nx2", 2, 2).exprs.size() == 2);
  }

  TEST_CASE("domain errors") {
    auto jet_at = [](const char* src, std::vector<double> x) {
      return eval_jet3(parse_map(src, static_cast<int>(x.size()), 1), x);
    };
    CHECK_THROWS_AS(jet_at("log(x1)", {0.0}), DomainError);
    CHECK_THROWS_AS(jet_at("log(x1)", {-1.0}), DomainError);
    CHECK_THROWS_AS(jet_at("sqrt(x1)", {0.0}), DomainError);
    CHECK_THROWS_AS(jet_at("sqrt(x1)", {-1.0}), DomainError);
    CHECK_THROWS_AS(jet_at("1/x1", {0.0}), DomainError);
    CHECK_THROWS_AS(jet_at("x1^0.5", {-1.0}), DomainError);
    CHECK_THROWS_AS(jet_at("x1^-2", {0.0}), DomainError);
    CHECK_THROWS_AS(jet_at("2^x1 * x1^x1", {-1.0}), DomainError);
    CHECK_THROWS_AS(jet_at("exp(exp(x1))", {10.0}), DomainError);
    CHECK_NOTHROW(jet_at("x1^3", {-1.0}));
    CHECK_NOTHROW(jet_at("x1^2", {0.0}));
    CHECK_THROWS_AS(evaluate_value(*parse_expression("log(x1)", 1), std::vector<double>{0.0}), DomainError);
  }
}
