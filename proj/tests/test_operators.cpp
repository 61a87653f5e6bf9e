#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "expsamp/operators.hpp"
#include "expsamp/oracle.hpp"
#include "expsamp/test_functions.hpp"
#include "test_support.hpp"

using namespace expsamp;
using Catch::Approx;

namespace {

constexpr double kE = std::numbers::e;

OperatorConfig config(MellinKernel phi, MellinKernel psi, int n, double a, double b) {
  return OperatorConfig{std::move(phi), std::move(psi), n, a, b, {}};
}

}  // namespace

TEST_CASE("index sets") {
  CHECK(index_set(1, 1.0, kE) == std::vector<long>{0, 1});
  CHECK(index_set(2, 1.0, kE) == std::vector<long>{0, 1, 2});
  const auto j = index_set(17, 0.5, 3.0);
  CHECK(j.front() == -11);
  CHECK(j.back() == 18);
  CHECK(j.size() == 30);
  CHECK(index_set(1, 1.1, 1.2).empty());
  CHECK_THROWS_AS(index_set(3, 2.0, 1.0), DomainError);
}

TEST_CASE("operator configuration is validated") {
  const auto b2 = MellinKernel::bspline(2);
  CHECK_THROWS_AS(SamplingOperator(config(b2, b2, 1, 1.0, kE)), ConfigError);
  CHECK_THROWS_AS(SamplingOperator(config(b2, b2, 0, 0.5, 3.0)), ConfigError);
  CHECK_THROWS_AS(SamplingOperator(config(b2, b2, 3, 0.0, 3.0)), ConfigError);
  CHECK_NOTHROW(SamplingOperator(config(b2, b2, 2, 1.0, kE)));
  CHECK(parse_operator_kind("max-min") == OperatorKind::max_min);
  CHECK_THROWS_AS(parse_operator_kind("sum"), ConfigError);
}

TEST_CASE("unit coefficients are computed once per operator") {
  const SamplingOperator op(config(MellinKernel::bspline(3), MellinKernel::jackson(1.05, 1), 9, 0.25, 3.0));
  CHECK(op.unit_coefficients().size() == op.indices().size());
  const auto first = op.bind(FunctionHandle::constant(0.3));
  const auto second = op.bind(FunctionHandle::constant(0.6));
  CHECK(op.unit_coefficients().data() == SamplingOperator(op).unit_coefficients().data());
  CHECK(first.max_product(1.1).denominator == second.max_product(1.1).denominator);
}

TEST_CASE("max-product reproduces constants") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cfg = config(testing::random_kernel(rng), testing::random_kernel(rng), 3 + trial, 0.25, 3.0);
    const auto bound = SamplingOperator(cfg).bind(FunctionHandle::constant(0.7));
    for (double w : {0.4, 0.8, 1.5, 2.0, 2.5}) {
      const auto ev = bound.max_product(w);
      REQUIRE_FALSE(ev.skipped);
      CHECK(std::abs(ev.value - 0.7) <= 1e-12);
    }
  }
}

TEST_CASE("max-min of the zero function is zero") {
  const auto cfg = config(MellinKernel::bspline(3), MellinKernel::fejer(std::numbers::pi, 0.0), 11, 0.25, 3.0);
  const auto bound = SamplingOperator(cfg).bind(FunctionHandle::constant(0.0));
  for (double w : {0.5, 1.0, 2.9}) CHECK(bound.max_min(w).value == 0.0);
}

TEST_CASE("degenerate denominators are skipped and reported") {
  const auto b2 = MellinKernel::bspline(2);
  const auto bound = SamplingOperator(config(b2, b2, 3, 1.0, kE)).bind(FunctionHandle::constant(0.5));
  const auto ev = bound.max_product(10.0);
  CHECK(ev.skipped);
  CHECK(ev.skip_reason == "degenerate denominator");
  CHECK(std::isnan(ev.value));
  CHECK(bound.max_min(10.0).skipped);
  CHECK_FALSE(bound.max_product(1.5).skipped);
  CHECK_THROWS_AS(bound.max_product(0.0), DomainError);
}

TEST_CASE("ties pick the smallest index") {
  const auto b2 = MellinKernel::bspline(2);
  // with w^n = e^{k + 1/2} the two neighbours k and k + 1 weigh equally
  const auto bound = SamplingOperator(config(b2, MellinKernel::bspline(3), 1, 0.01, 100.0)).bind(FunctionHandle::constant(1.0));
  const auto ev = bound.max_product(std::exp(0.5));
  const auto units = SamplingOperator(config(b2, MellinKernel::bspline(3), 1, 0.01, 100.0)).unit_coefficients();
  REQUIRE(units[4] == units[5]);  // k = 0 and k = 1
  CHECK(ev.active_index == 0);
}

TEST_CASE("max-min flags inputs outside the unit range") {
  const auto b2 = MellinKernel::bspline(2);
  const auto op = SamplingOperator(config(b2, b2, 4, 0.5, 2.5));
  CHECK(op.bind(FunctionHandle::constant(2.0)).max_min(1.0).outside_guarantee_range);
  CHECK_FALSE(op.bind(FunctionHandle::constant(0.5)).max_min(1.0).outside_guarantee_range);
}

TEST_CASE("three-piece step on [1, e^2] matches the brute-force oracle") {
  std::mt19937_64 rng(11);
  const auto b2 = MellinKernel::bspline(2);
  const auto cfg = config(b2, b2, 2, 1.0, kE * kE);
  const auto h = testing::oracle_aligned_steps(rng, cfg.a, cfg.b, 3, 0.0, 1.0);
  const auto bound = SamplingOperator(cfg).bind(h);
  for (double w : {1.3, 2.2, 4.0}) {
    CHECK(std::abs(bound.max_product(w).value - brute_force_oracle(OperatorKind::max_product, h, cfg, w)) <= 1e-6);
    CHECK(std::abs(bound.max_min(w).value - brute_force_oracle(OperatorKind::max_min, h, cfg, w)) <= 1e-6);
  }
}

TEST_CASE("ramp on [1, e] matches the brute-force oracle") {
  const auto b2 = MellinKernel::bspline(2);
  const auto cfg = config(b2, b2, 3, 1.0, kE);
  const FunctionHandle ramp("ramp", 1.0, kE,
                            [](double w) { return std::clamp((w - 1.3) / 0.5, 0.0, 1.0); }, {1.3, 1.8},
                            ValueRange{0.0, 1.0});
  const auto bound = SamplingOperator(cfg).bind(ramp);
  for (double w : {1.1, 1.5, 2.0, 2.6})
    CHECK(std::abs(bound.max_min(w).value - brute_force_oracle(OperatorKind::max_min, ramp, cfg, w)) <= 1e-6);
}

TEST_CASE("oracle guards and constants") {
  const auto b2 = MellinKernel::bspline(2);
  CHECK_THROWS_AS(brute_force_oracle(OperatorKind::max_product, FunctionHandle::constant(1.0),
                                     config(b2, b2, 9, 0.5, 2.0), 1.0),
                  ConfigError);
  const auto cfg = config(b2, MellinKernel::bspline(3), 3, 0.5, 2.0);
  CHECK(brute_force_oracle(OperatorKind::max_product, FunctionHandle::constant(0.4), cfg, 1.2, 20000) ==
        Approx(0.4).margin(1e-9));
}

TEST_CASE("operator lemmas on random inputs") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const double a = 0.2 + 0.5 * unit(rng), b = a * std::exp(1.5 + unit(rng));
    const int n = 2 + static_cast<int>(unit(rng) * 12);
    const auto op = SamplingOperator(config(testing::random_kernel(rng), testing::random_kernel(rng), n, a, b));
    const auto h = testing::random_polyline(rng, a, b, 6, 0.0, 0.5);
    const auto d = testing::random_polyline(rng, a, b, 6, 0.0, 0.5);
    const auto g = testing::combine(h, d, 1.0, 1.0);
    const auto diff = testing::combine(h, g, 1.0, -1.0, true);
    const auto scaled = testing::combine(h, h, 3.0, 0.0);
    const auto bh = op.bind(h), bg = op.bind(g), bd = op.bind(d), bdiff = op.bind(diff), bs = op.bind(scaled);
    const double w = a * std::pow(b / a, 0.1 + 0.8 * unit(rng));
    for (auto kind : {OperatorKind::max_product, OperatorKind::max_min}) {
      const double vh = bh.evaluate(kind, w).value, vg = bg.evaluate(kind, w).value;
      CHECK(vh <= vg + 1e-12);
      CHECK(vg <= vh + bd.evaluate(kind, w).value + 1e-10);
      CHECK(std::abs(vh - vg) <= bdiff.evaluate(kind, w).value + 1e-10);
    }
    CHECK(std::abs(bs.max_product(w).value - 3.0 * bh.max_product(w).value) <= 1e-12);
    CHECK(bg.max_min(w).value <= 1.0 + 1e-12);
  }
}

TEST_CASE("table-scale example stays near the tabulated error") {
  const auto h1 = test_function(TestFunction::h1);
  const auto cfg = config(MellinKernel::bspline(2), MellinKernel::jackson(1.05, 1), 17, 0.25, 3.0);
  const double err = std::abs(max_product_eval(h1, cfg, 0.8).value - h1(0.8));
  CHECK(err == Approx(0.00916).epsilon(0.25));
  const auto cfg2 = config(MellinKernel::bspline(3), MellinKernel::fejer(std::numbers::pi, 0.0), 53, 0.25, 3.0);
  const double err2 = std::abs(max_min_eval(h1, cfg2, 2.5).value - h1(2.5));
  CHECK(err2 == Approx(0.02049).epsilon(0.25));
}
