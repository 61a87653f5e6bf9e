#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "expsamp/error.hpp"

namespace expsamp {

struct ValueRange {
  double lo;
  double hi;
};

/// A real-valued function on an interval of the positive reals.
///
/// `breakpoints` lists the points where the function jumps or has a kink;
/// integrators cut their panels there.
class FunctionHandle {
 public:
  FunctionHandle(std::string name, double lo, double hi, std::function<double(double)> evaluator,
                 std::vector<double> breakpoints = {}, std::optional<ValueRange> declared_range = std::nullopt)
      : name_(std::move(name)),
        lo_(lo),
        hi_(hi),
        evaluator_(std::move(evaluator)),
        breakpoints_(std::move(breakpoints)),
        declared_range_(declared_range) {
    if (!(lo_ < hi_)) throw ConfigError("function '" + name_ + "': empty domain");
    std::sort(breakpoints_.begin(), breakpoints_.end());
  }

  static FunctionHandle constant(double c, double lo = 0.0, double hi = 1e300) {
    return FunctionHandle("const:" + std::to_string(c), lo, hi, [c](double) { return c; }, {}, ValueRange{c, c});
  }

  /// Unchecked evaluation.
  double operator()(double w) const { return evaluator_(w); }

  /// Evaluation with a domain check.
  double at(double w) const {
    if (!std::isfinite(w) || w < lo_ || w > hi_)
      throw DomainError("function '" + name_ + "' evaluated outside [" + std::to_string(lo_) + ", " +
                        std::to_string(hi_) + "]");
    return evaluator_(w);
  }

  const std::string& name() const noexcept { return name_; }
  double domain_lo() const noexcept { return lo_; }
  double domain_hi() const noexcept { return hi_; }
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::optional<ValueRange>& declared_range() const noexcept { return declared_range_; }

  /// Range of the function sampled on `points` points over [a, b]; log-spaced
  /// when a > 0, uniform otherwise.
  ValueRange probe_range(double a, double b, int points = 1000) const {
    if (!(a < b) || points < 2) throw ConfigError("probe_range: need a < b and at least two points");
    ValueRange r{INFINITY, -INFINITY};
    for (int i = 0; i < points; ++i) {
      const double t = static_cast<double>(i) / (points - 1);
      double w = a > 0.0 ? a * std::pow(b / a, t) : a + (b - a) * t;
      if (i == points - 1) w = b;
      const double v = evaluator_(w);
      r.lo = std::min(r.lo, v);
      r.hi = std::max(r.hi, v);
    }
    return r;
  }

  /// True iff every probe sample on [a, b] lies in [lo, hi] within slack.
  bool range_within(double a, double b, double lo, double hi, double slack = 1e-9, int points = 1000) const {
    const auto r = probe_range(a, b, points);
    return r.lo >= lo - slack && r.hi <= hi + slack;
  }

 private:
  std::string name_;
  double lo_;
  double hi_;
  std::function<double(double)> evaluator_;
  std::vector<double> breakpoints_;
  std::optional<ValueRange> declared_range_;
};

}  // namespace expsamp
