#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "expsamp/orlicz.hpp"
#include "expsamp/properties.hpp"

using namespace expsamp;

TEST_CASE("max/min lemma suites hold on 10^4 draws") {
  const auto reports = maxmin_algebra_checks(42, 10'000);
  REQUIRE(reports.size() == 4);
  for (const auto& r : reports) {
    INFO(r.name << ": " << r.counterexample);
    CHECK(r.passed());
    CHECK(r.cases == 10'000);
    CHECK(r.violations == 0);
  }
}

TEST_CASE("max/min suites are reproducible for a fixed seed") {
  const auto a = maxmin_algebra_checks(5, 100);
  const auto b = maxmin_algebra_checks(5, 100);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].cases == b[i].cases);
  CHECK_THROWS_AS(maxmin_algebra_checks(5, 0), ConfigError);
}

TEST_CASE("lemma boundary instances") {
  // identical sequences: both sides vanish
  const std::vector<double> d{0.3, -1.0, 2.5};
  const double lhs = *std::max_element(d.begin(), d.end()) - *std::max_element(d.begin(), d.end());
  CHECK(lhs == 0.0);
  // mu = nu = s = 1
  CHECK(std::abs(std::min(1.0, 1.0) - std::min(1.0, 1.0)) <= std::min(1.0, 0.0));
}

TEST_CASE("denominator lower bound") {
  const double e2 = std::exp(2.0);
  SECTION("fejer sampling kernel with a bspline average") {
    const OperatorConfig cfg{MellinKernel::fejer(std::numbers::pi, 0.0), MellinKernel::bspline(2), 5, 1.0, e2, {}};
    const auto r = denominator_lower_bound_check(cfg, log_grid(1.01, e2 - 0.01, 100));
    INFO(r.counterexample);
    CHECK(r.status == PropertyStatus::passed);
    CHECK(r.cases == 100);
  }
  SECTION("zero theta is a rejected precondition") {
    const OperatorConfig cfg{MellinKernel::bspline(2), MellinKernel::bspline(2), 5, 1.0, e2, {}};
    CHECK(denominator_lower_bound_check(cfg, {1.5}).status == PropertyStatus::precondition_rejected);
  }
  SECTION("b/a = e^{1/n} is a rejected precondition") {
    const OperatorConfig cfg{MellinKernel::fejer(std::numbers::pi, 0.0), MellinKernel::bspline(2), 1, 1.0,
                             std::numbers::e, {}};
    CHECK(denominator_lower_bound_check(cfg, {1.5}).status == PropertyStatus::precondition_rejected);
  }
}

TEST_CASE("jensen-type max inequalities") {
  for (const char* spec : {"power:2", "power:1.5", "powerlog:1:1", "exppower:1"}) {
    for (const auto& r : jensen_max_checks(parse_phi_function(spec), 42, 10'000)) {
      INFO(spec << " " << r.name << ": " << r.counterexample);
      CHECK(r.passed());
    }
  }
}
