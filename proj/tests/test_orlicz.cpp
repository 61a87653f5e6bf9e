#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "expsamp/orlicz.hpp"
#include "expsamp/test_functions.hpp"
#include "test_support.hpp"

using namespace expsamp;
using Catch::Approx;

namespace {
constexpr double kE = std::numbers::e;
}

TEST_CASE("phi-function parsing") {
  CHECK(parse_phi_function("power:2")(3.0) == 9.0);
  CHECK(parse_phi_function("exppower:1")(1.0) == Approx(kE - 1.0));
  CHECK(parse_phi_function("powerlog:1:1")(kE - 1.0) == Approx((kE - 1.0) * 1.0));
  CHECK_THROWS_AS(parse_phi_function("power"), ConfigError);
  CHECK_THROWS_AS(parse_phi_function("cosh:1"), ConfigError);
  CHECK(parse_phi_function("Power:2").name() == parse_phi_function("power:2").name());
}

TEST_CASE("exp-power overflow is reported") {
  const auto phi = PhiFunction::exp_power(1.0);
  CHECK_THROWS_AS(phi(800.0), OverflowError);
  try {
    (void)modular(phi, FunctionHandle::constant(1.0), 1.0, kE, 1000.0);
    FAIL("expected overflow");
  } catch (const OverflowError& e) {
    CHECK(std::string(e.what()).find("lambda=1000") != std::string::npos);
  }
}

TEST_CASE("modular of constants") {
  CHECK(modular(PhiFunction::power(2), FunctionHandle::constant(1.0), 1.0, kE).modular_value ==
        Approx(1.0).margin(1e-12));
  for (double p : {1.5, 2.0, 3.0})
    CHECK(modular(PhiFunction::power(p), FunctionHandle::constant(0.7), 0.4, 2.5).modular_value ==
          Approx(std::pow(0.7, p) * std::log(2.5 / 0.4)).margin(1e-12));
  CHECK(modular(PhiFunction::exp_power(1.0), FunctionHandle::constant(0.9), 1.0, kE).modular_value ==
        Approx(std::exp(0.9) - 1.0).margin(1e-12));
  CHECK_THROWS_AS(modular(PhiFunction::power(2), FunctionHandle::constant(1.0), 1.0, kE, 0.0), ConfigError);
}

TEST_CASE("luxemburg norm") {
  CHECK(luxemburg_norm(PhiFunction::power(2), FunctionHandle::constant(1.0), 1.0, kE) == Approx(1.0).margin(1e-9));
  CHECK(luxemburg_norm(PhiFunction::power(3), FunctionHandle::constant(1.0), 1.0, kE) == Approx(1.0).margin(1e-9));
  CHECK(luxemburg_norm(PhiFunction::power(2), FunctionHandle::constant(0.0), 1.0, kE) == 0.0);
  CHECK(luxemburg_norm(PhiFunction::power(2), FunctionHandle::constant(3.0), 1.0, std::exp(4.0)) ==
        Approx(6.0).margin(1e-8));
}

TEST_CASE("luxemburg norm and modular are consistent") {
  const auto h2 = test_function(TestFunction::h2);
  for (const char* spec : {"power:2", "powerlog:1:1", "exppower:1"}) {
    const auto phi = parse_phi_function(spec);
    const double norm = luxemburg_norm(phi, h2, 0.25, 3.0);
    INFO(spec);
    CHECK(modular(phi, h2, 0.25, 3.0, 1.0 / norm).modular_value <= 1.0 + 1e-6);
    CHECK(modular(phi, h2, 0.25, 3.0, 1.0 / (norm * 0.999)).modular_value > 1.0);
  }
}

TEST_CASE("modular is convex and monotone in the scaling") {
  std::mt19937_64 rng(3);
  const auto phi = PhiFunction::power(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = testing::random_polyline(rng, 0.5, 2.5, 5, -1.0, 1.0);
    const auto g = testing::random_polyline(rng, 0.5, 2.5, 5, -1.0, 1.0);
    const auto mid = testing::combine(f, g, 0.5, 0.5);
    const double lhs = modular(phi, mid, 0.5, 2.5).modular_value;
    const double rhs =
        0.5 * (modular(phi, f, 0.5, 2.5).modular_value + modular(phi, g, 0.5, 2.5).modular_value);
    CHECK(lhs <= rhs + 2e-10);
    CHECK(modular(phi, f, 0.5, 2.5, 0.5).modular_value <= modular(phi, f, 0.5, 2.5, 0.7).modular_value);
  }
}

TEST_CASE("delta2 probe") {
  const auto grid = log_grid(0.01, 20.0, 200);
  const auto p = delta2_probe(PhiFunction::power(2), grid);
  CHECK(p.sup_ratio == Approx(4.0).margin(1e-12));
  CHECK(p.declared == Delta2::holds);
  const auto pl = delta2_probe(PhiFunction::power_log(1.0, 1.0), grid);
  CHECK(pl.sup_ratio <= 4.0 + 1e-12);
  CHECK(pl.bounded_by_declared);
  const auto ep = delta2_probe(PhiFunction::exp_power(1.0), grid);
  CHECK(ep.log_ratio.back() == Approx(std::log((std::exp(40.0) - 1.0) / (std::exp(20.0) - 1.0))).margin(1e-9));
  CHECK(ep.sup_ratio > 1e6);
  CHECK(ep.declared == Delta2::fails);
  CHECK(ep.diverging);
  CHECK_THROWS_AS(delta2_probe(PhiFunction::power(2), {}), ConfigError);
}

TEST_CASE("modular convergence series") {
  const OperatorConfig tmpl{MellinKernel::bspline(3), MellinKernel::fejer(std::numbers::pi, 0.0), 17, 0.25, 3.0, {}};
  const std::vector<int> ns{17, 26, 35, 53};
  const auto phi = PhiFunction::power(2);
  SECTION("constants give zero") {
    for (const auto& r :
         modular_convergence_series(phi, OperatorKind::max_product, FunctionHandle::constant(0.6), tmpl, ns))
      CHECK(r.modular_value == Approx(0.0).margin(1e-20));
  }
  SECTION("smooth signal decreases strictly") {
    const auto s = modular_convergence_series(phi, OperatorKind::max_product, test_function(TestFunction::h1), tmpl, ns);
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i].modular_value < s[i - 1].modular_value);
  }
  SECTION("piecewise signal does not increase") {
    OperatorConfig t2 = tmpl;
    t2.phi = MellinKernel::bspline(2);
    t2.psi = MellinKernel::jackson(1.05, 1);
    const auto s = modular_convergence_series(phi, OperatorKind::max_product, test_function(TestFunction::h2), t2, ns);
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i].modular_value <= s[i - 1].modular_value);
  }
  CHECK_THROWS_AS(modular_convergence_series(phi, OperatorKind::max_min, FunctionHandle::constant(0.5), tmpl, {26, 17}),
                  ConfigError);
}
