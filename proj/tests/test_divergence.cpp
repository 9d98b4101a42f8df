#include <cmath>
#include <random>

#include "doctest.h"
#include "gbclab/divergence.hpp"
#include "gbclab/error.hpp"
#include "gbclab/sampling.hpp"
#include "support.hpp"

using namespace gbclab;
using doctest::Approx;

namespace {

std::vector<double> steps_at(const std::vector<double>& x, double base) {
  double r = 0.0;
  for (double v : x) r += v * v;
  r = std::sqrt(r);
  return {base * r, 0.5 * base * r, 0.25 * base * r};
}

void check_second_order(const MapSpec& map, const IdentitySelector& sel, int count, std::uint64_t seed) {
  for (const auto& x : annulus_points(count, map.n, 1.0, 4.0, seed)) {
    const auto r = identity_residual(map, sel, x, steps_at(x, 4e-4));
    CHECK(r.residual <= 1e-5 * (r.scale + 1e-12));
    if (r.order_estimate) {
      CHECK(*r.order_estimate >= 1.7);
      CHECK(*r.order_estimate <= 2.3);
    }
  }
}

}  // namespace

TEST_SUITE("divergence") {
  TEST_CASE("codimension one: P2 identity with L2 only") {
    const MapSpec map = parse_map(testing::kRadialM1, 5, 1);
    check_second_order(map, {IdentityKind::P2}, 10, 3);
    check_second_order(map, {IdentityKind::P2, 0.0, false}, 10, 3);
  }

  TEST_CASE("flat normal bundle: P2 identity holds with L2 alone") {
    const MapSpec map = parse_map(testing::kFlatNormalM2, 5, 2);
    check_second_order(map, {IdentityKind::P2, 0.0, false}, 10, 4);
  }

  TEST_CASE("generic codimension two: P2, P1 and EGB identities") {
    const MapSpec map = parse_map(testing::kGenericM2, 5, 2);
    check_second_order(map, {IdentityKind::P2}, 10, 5);
    check_second_order(map, {IdentityKind::P1}, 10, 5);
    check_second_order(map, {IdentityKind::Egb, 0.7}, 10, 5);
  }

  TEST_CASE("negative control plateaus at half of |L2perp|") {
    const MapSpec map = parse_map(testing::kGenericM2, 5, 2);
    const std::vector<double> x{1.2, -0.4, 0.9, 0.5, -1.1};
    const auto full = identity_residual(map, {IdentityKind::P2}, x, steps_at(x, 4e-4));
    const auto cut = identity_residual(map, {IdentityKind::P2, 0.0, false}, x, steps_at(x, 4e-4));
    REQUIRE(std::abs(cut.l2perp) > 1e-6);
    CHECK(cut.residual == Approx(0.5 * std::abs(cut.l2perp)).epsilon(1e-3));
    CHECK(cut.residuals[0] == Approx(cut.residuals[2]).epsilon(1e-3));
    CHECK(cut.residual >= 10.0 * full.residual);
  }

  TEST_CASE("linear map satisfies every identity exactly") {
    const MapSpec map = parse_map("x1 - 2*x3; 0.5*x2 + x5", 5, 2);
    const std::vector<double> x{1, 2, 3, 4, 5};
    const auto r = identity_residual(map, {IdentityKind::P2}, x, default_steps(x));
    CHECK(r.residual == 0.0);
    CHECK_FALSE(r.order_estimate.has_value());
  }

  TEST_CASE("default steps scale with |x|") {
    const std::vector<double> x{3, 4};
    const auto s = default_steps(x);
    REQUIRE(s.size() == 3);
    CHECK(s[0] == Approx(5e-2));
    CHECK(s[2] == Approx(1.25e-2));
    const std::vector<double> o{0, 0};
    CHECK(default_steps(o)[0] == Approx(1e-2));
  }

  TEST_CASE("sweep keeps input order and records per-point errors") {
    const MapSpec map = parse_map("log(x1)", 2, 1);
    const std::vector<std::vector<double>> pts{{1.0, 0.0}, {-1.0, 0.0}, {2.0, 1.0}};
    const auto recs = sweep(map, {IdentityKind::P1}, pts, {});
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].result.has_value());
    CHECK_FALSE(recs[1].result.has_value());
    CHECK_FALSE(recs[1].error.empty());
    CHECK(recs[2].point == pts[2]);
    const auto serial = sweep(map, {IdentityKind::P1}, pts, {}, Execution::Serial);
    CHECK(serial[2].result->residual == recs[2].result->residual);
  }
}
