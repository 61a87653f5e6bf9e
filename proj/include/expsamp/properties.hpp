#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "expsamp/kernel_metrics.hpp"
#include "expsamp/operators.hpp"

namespace expsamp {

enum class PropertyStatus { passed, failed, precondition_rejected };

struct PropertyReport {
  std::string name;
  PropertyStatus status = PropertyStatus::passed;
  std::size_t cases = 0;
  std::size_t violations = 0;
  std::string counterexample;  // first violation, or the rejection reason

  bool passed() const noexcept { return status == PropertyStatus::passed; }
};

namespace detail {

inline std::string describe(const std::vector<double>& xs) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? ", " : "") << xs[i];
  os << ']';
  return os.str();
}

inline void record(PropertyReport& report, bool ok, const std::string& what) {
  ++report.cases;
  if (ok) return;
  if (report.violations++ == 0) report.counterexample = what;
  report.status = PropertyStatus::failed;
}

}  // namespace detail

/// Randomised checks of the four max/min lemmas:
///  - max d - max e <= max |d - e|
///  - |m^n - m^s| <= m ^ |n - s|           for m, n, s in [0, 1]
///  - m^n + s^n >= (m + s)^n               for m, s, n >= 0
///  - l max(d ^ e) = max(l d ^ l e)        for d, e in [0, 1], l > 0
/// where ^ is the minimum. Each lemma gets `cases` draws from std::mt19937_64(seed).
inline std::vector<PropertyReport> maxmin_algebra_checks(unsigned long long seed, std::size_t cases) {
  if (cases < 1) throw ConfigError("maxmin_algebra_checks: cases must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> wide(-10.0, 10.0);
  std::uniform_int_distribution<int> length(1, 32);

  std::vector<PropertyReport> reports(4);
  reports[0].name = "max difference bound";
  reports[1].name = "min difference bound";
  reports[2].name = "min subadditivity";
  reports[3].name = "max-min homogeneity";

  for (std::size_t c = 0; c < cases; ++c) {
    const auto len = static_cast<std::size_t>(length(rng));
    std::vector<double> d(len), e(len);
    for (std::size_t i = 0; i < len; ++i) {
      d[i] = wide(rng);
      // occasionally tie the sequences to exercise equal maxima
      e[i] = (c % 7 == 0) ? d[i] : wide(rng);
    }
    const double lhs = *std::max_element(d.begin(), d.end()) - *std::max_element(e.begin(), e.end());
    double rhs = 0.0;
    for (std::size_t i = 0; i < len; ++i) rhs = std::max(rhs, std::abs(d[i] - e[i]));
    detail::record(reports[0], lhs <= rhs, "d=" + detail::describe(d) + " e=" + detail::describe(e));
  }

  for (std::size_t c = 0; c < cases; ++c) {
    const double m = unit(rng), n = unit(rng), s = unit(rng);
    const double lhs = std::abs(std::min(m, n) - std::min(m, s));
    const double rhs = std::min(m, std::abs(n - s));
    detail::record(reports[1], lhs <= rhs, "mu,nu,s=" + detail::describe({m, n, s}));
  }

  for (std::size_t c = 0; c < cases; ++c) {
    const double m = 2.0 * unit(rng), s = 2.0 * unit(rng), n = 2.0 * unit(rng);
    const double lhs = std::min(m, n) + std::min(s, n);
    const double rhs = std::min(m + s, n);
    detail::record(reports[2], lhs >= rhs, "mu,s,nu=" + detail::describe({m, s, n}));
  }

  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (std::size_t c = 0; c < cases; ++c) {
    const auto len = static_cast<std::size_t>(length(rng));
    std::vector<double> d(len), e(len);
    for (std::size_t i = 0; i < len; ++i) {
      d[i] = unit(rng);
      e[i] = unit(rng);
    }
    const double lambda = scale(rng);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      lhs = std::max(lhs, std::min(d[i], e[i]));
      rhs = std::max(rhs, std::min(lambda * d[i], lambda * e[i]));
    }
    lhs *= lambda;
    detail::record(reports[3], lhs == rhs,
                   "lambda=" + std::to_string(lambda) + " d=" + detail::describe(d) + " e=" + detail::describe(e));
  }
  return reports;
}

/// Checks max_k phi(e^{-k} w^n) C_k(1) >= K theta - 1e-8 on `w_grid`, where
/// K is the unit mass of psi and theta the infimum of phi over [1, e].
/// Rejected (not failed) when theta == 0 or b/a <= e^{1/n}.
inline PropertyReport denominator_lower_bound_check(const OperatorConfig& cfg, const std::vector<double>& w_grid) {
  PropertyReport report;
  report.name = "denominator lower bound";
  if (!cfg.ratio_condition()) {
    report.status = PropertyStatus::precondition_rejected;
    report.counterexample = "b/a must exceed e^{1/n}";
    return report;
  }
  const double theta = kernel_theta(cfg.phi);
  if (!(theta > 0.0)) {
    report.status = PropertyStatus::precondition_rejected;
    report.counterexample = "theta of " + cfg.phi.name() + " is 0";
    return report;
  }
  const auto& psi = cfg.psi;
  const double unit_mass =
      integrate([&](double u) { return psi.at_log(u); }, 0.0, 1.0, cfg.quad, psi.log_knots(0.0, 1.0)).value;
  const double bound = unit_mass * theta - 1e-8;
  const SamplingOperator op(cfg);
  const auto one = op.bind(FunctionHandle::constant(1.0));
  for (double w : w_grid) {
    const auto ev = one.max_product(w);
    std::ostringstream os;
    os.precision(17);
    os << "w=" << w << " D(w)=" << ev.denominator << " K*theta=" << unit_mass * theta;
    detail::record(report, !ev.skipped && ev.denominator >= bound, os.str());
  }
  return report;
}

}  // namespace expsamp
