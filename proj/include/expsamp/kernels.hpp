#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "expsamp/error.hpp"
#include "expsamp/quadrature.hpp"

namespace expsamp {

/// sin(pi x) / (pi x), with sinc(0) = 1.
inline double sinc(double x) noexcept {
  const double px = std::numbers::pi * x;
  if (std::abs(px) < 1e-5) {
    const double p2 = px * px;
    return 1.0 - p2 / 6.0 + p2 * p2 / 120.0;
  }
  return std::sin(px) / px;
}

struct BSplineFamily {
  int order;
};

/// F(w) = beta / (2 pi w^t) * sinc^2(beta log(sqrt w) / pi)
struct FejerFamily {
  double beta;
  double t;
};

/// J(w) = d * sinc^{2 beta}(log w / (2 gamma beta pi))
struct JacksonFamily {
  double gamma;
  int beta;
};

using KernelFamily = std::variant<BSplineFamily, FejerFamily, JacksonFamily>;

/// Closed interval in log coordinates, u = log w.
struct LogInterval {
  double lo;
  double hi;
};

namespace detail {

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline double bspline_closed(int order, double u) noexcept {
  const double half = 0.5 * order;
  if (!(std::abs(u) < half)) return 0.0;
  switch (order) {
    case 2:
      return u <= 0.0 ? 1.0 + u : 1.0 - u;
    case 3:
      if (u <= -0.5) return 0.5 * (u + 1.5) * (u + 1.5);
      if (u <= 0.5) return 0.75 - u * u;
      return 0.5 * (1.5 - u) * (1.5 - u);
    case 4:
      if (u <= -1.0) return (u + 2.0) * (u + 2.0) * (u + 2.0) / 6.0;
      if (u <= 0.0) return -0.5 * u * u * u - u * u + 2.0 / 3.0;
      if (u <= 1.0) return 0.5 * u * u * u - u * u + 2.0 / 3.0;
      return (2.0 - u) * (2.0 - u) * (2.0 - u) / 6.0;
    default:
      break;
  }
  // Alternating-sum form for orders without a tabulated closed form.
  double sum = 0.0;
  double factorial = 1.0;
  for (int i = 2; i < order; ++i) factorial *= i;
  for (int k = 0; k <= order; ++k) {
    const double x = half + u - k;
    if (x <= 0.0) break;
    const double term = binomial(order, k) * std::pow(x, order - 1);
    sum += (k % 2 == 0) ? term : -term;
  }
  return std::max(0.0, sum / factorial);
}

inline double sinc_power(double x, int power) noexcept {
  const double s = sinc(x);
  double r = 1.0;
  for (int i = 0; i < power; ++i) r *= s;
  return r;
}

inline std::string format_number(double x) {
  if (std::abs(x - std::numbers::pi) < 1e-15) return "pi";
  std::ostringstream os;
  os.precision(15);
  os << x;
  return os.str();
}

}  // namespace detail

struct SincPowerIntegral {
  double value;
  double error_bound;
  double truncation;  // U, the half-width integrated numerically
};

/// Integral over the real line of sinc^{2 beta}(u / c).
///
/// [-U, U] is integrated numerically with panels cut at the zeros u = c m,
/// U itself a multiple of c. The tail beyond U is replaced by its averaged
/// value mean(sin^{2beta}) (c/pi)^{2beta} U^{1-2beta} / (2beta - 1); U is the
/// smallest multiple of c for which the remainder bound
/// 4 (c/2pi)^2 2beta (c/pi)^{2beta} U^{-2beta-1} (both tails) is below
/// tail_budget.
inline SincPowerIntegral sinc_power_line_integral(double c, int beta, double tail_budget, double quad_tol,
                                                  std::int64_t max_periods = 4'000'000) {
  if (!(c > 0.0) || beta < 1) throw ConfigError("sinc_power_line_integral: need c > 0 and beta >= 1");
  const double ratio = c / std::numbers::pi;
  const double scale = std::pow(ratio, 2.0 * beta);
  const double remainder_coeff = 4.0 * (c * c / (4.0 * std::numbers::pi * std::numbers::pi)) * 2.0 * beta * scale;
  // smallest U = c m with remainder_coeff * U^{-(2beta+1)} <= tail_budget
  const double u_needed = std::pow(remainder_coeff / tail_budget, 1.0 / (2.0 * beta + 1.0));
  const double periods = std::max(4.0, std::ceil(u_needed / c));
  if (periods > static_cast<double>(max_periods))
    throw ConvergenceError("sinc_power_line_integral: truncation exceeds period budget", 0.0,
                           remainder_coeff * std::pow(c * max_periods, -(2.0 * beta + 1.0)));
  const auto m = static_cast<std::int64_t>(periods);
  const double upper = c * static_cast<double>(m);

  std::vector<double> zeros;
  zeros.reserve(static_cast<std::size_t>(m));
  for (std::int64_t j = 1; j < m; ++j) zeros.push_back(c * static_cast<double>(j));
  QuadratureSpec spec;
  spec.abs_tol = quad_tol;
  const auto half_line = integrate([&](double u) { return detail::sinc_power(u / c, 2 * beta); }, 0.0, upper,
                                   spec, zeros);

  const double mean_power = detail::binomial(2 * beta, beta) / std::pow(4.0, beta);
  const double tail = mean_power * scale * std::pow(upper, 1.0 - 2.0 * beta) / (2.0 * beta - 1.0);
  const double remainder = remainder_coeff * std::pow(upper, -(2.0 * beta + 1.0));
  return {2.0 * (half_line.value + tail), 2.0 * half_line.error + remainder, upper};
}

/// d_{gamma,beta} with d * int_0^inf sinc^{2beta}(log v / (2 gamma beta pi)) dv/v = 1.
inline double compute_jackson_norm_constant(double gamma, int beta, double tol = 1e-10) {
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) throw ConfigError("jackson: gamma must be >= 1");
  if (beta < 1) throw ConfigError("jackson: beta must be >= 1");
  if (!(tol > 0.0)) throw ConfigError("jackson: tolerance must be positive");
  const double c = 2.0 * gamma * beta * std::numbers::pi;
  // rough lower scale of the integral: c * sqrt(3 / (pi beta)), capped at c
  const double scale = c * std::min(1.0, std::sqrt(3.0 / (std::numbers::pi * beta)));
  const double budget = std::min(1e-9, 0.25 * tol * scale);
  SincPowerIntegral integral{};
  try {
    integral = sinc_power_line_integral(c, beta, budget, 0.25 * tol * scale);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError("jackson normalization did not converge", e.estimate() > 0 ? 1.0 / e.estimate() : 0.0,
                           e.error_bound());
  }
  const double relative = integral.error_bound / integral.value;
  if (!(relative <= tol))
    throw ConvergenceError("jackson normalization tolerance unattainable", 1.0 / integral.value, relative);
  return 1.0 / integral.value;
}

/// A Mellin-type kernel on the positive reals, immutable after construction.
class MellinKernel {
 public:
  static MellinKernel bspline(int order) {
    if (order < 2) throw ConfigError("bspline order must be >= 2");
    MellinKernel k;
    k.family_ = BSplineFamily{order};
    k.name_ = "bspline:" + std::to_string(order);
    k.support_ = LogInterval{-0.5 * order, 0.5 * order};
    return k;
  }

  static MellinKernel fejer(double beta, double t) {
    if (!(beta >= 1.0) || !std::isfinite(beta)) throw ConfigError("fejer beta must be >= 1");
    if (!std::isfinite(t)) throw ConfigError("fejer t must be finite");
    MellinKernel k;
    k.family_ = FejerFamily{beta, t};
    k.name_ = "fejer:" + detail::format_number(beta) + ":" + detail::format_number(t);
    return k;
  }

  static MellinKernel jackson(double gamma, int beta, double tol = 1e-10) {
    MellinKernel k;
    k.norm_constant_ = compute_jackson_norm_constant(gamma, beta, tol);
    k.family_ = JacksonFamily{gamma, beta};
    k.name_ = "jackson:" + detail::format_number(gamma) + ":" + std::to_string(beta);
    return k;
  }

  const std::string& name() const noexcept { return name_; }
  const KernelFamily& family() const noexcept { return family_; }
  double norm_constant() const noexcept { return norm_constant_; }
  bool is_compact() const noexcept { return support_.has_value(); }

  /// Support in log coordinates; nullopt when unbounded.
  std::optional<LogInterval> log_support() const noexcept { return support_; }

  /// Support [e^{lo}, e^{hi}] in w; nullopt when unbounded.
  std::optional<std::pair<double, double>> support() const {
    if (!support_) return std::nullopt;
    return std::pair{std::exp(support_->lo), std::exp(support_->hi)};
  }

  /// Kernel value at w > 0.
  double operator()(double w) const {
    if (!std::isfinite(w) || !(w > 0.0)) throw DomainError("kernel evaluation requires finite w > 0");
    return at_log(std::log(w));
  }

  /// Kernel value at w = e^u.
  double at_log(double u) const noexcept {
    return std::visit(
        [&](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, BSplineFamily>) {
            return detail::bspline_closed(f.order, u);
          } else if constexpr (std::is_same_v<T, FejerFamily>) {
            const double s = sinc(f.beta * u / (2.0 * std::numbers::pi));
            return f.beta / (2.0 * std::numbers::pi) * std::exp(-f.t * u) * s * s;
          } else {
            return norm_constant_ * detail::sinc_power(u / (2.0 * f.gamma * f.beta * std::numbers::pi), 2 * f.beta);
          }
        },
        family_);
  }

  /// Spacing of the zeros of the sinc factor in log coordinates (0 for B-splines).
  double zero_spacing() const noexcept {
    if (const auto* f = std::get_if<FejerFamily>(&family_)) return 2.0 * std::numbers::pi / f->beta;
    if (const auto* j = std::get_if<JacksonFamily>(&family_)) return 2.0 * j->gamma * j->beta * std::numbers::pi;
    return 0.0;
  }

  /// Points in [lo, hi] (log coordinates) where the kernel changes piece or
  /// touches zero: B-spline knots, sinc zeros. Useful panel boundaries.
  std::vector<double> log_knots(double lo, double hi) const {
    std::vector<double> out;
    if (!(lo < hi)) return out;
    if (const auto* b = std::get_if<BSplineFamily>(&family_)) {
      for (int j = 0; j <= b->order; ++j) {
        const double x = -0.5 * b->order + j;
        if (x >= lo && x <= hi) out.push_back(x);
      }
      return out;
    }
    const double step = zero_spacing();
    const double first = std::ceil(lo / step);
    const double last = std::floor(hi / step);
    for (double j = first; j <= last; j += 1.0)
      if (j != 0.0) out.push_back(j * step);
    return out;
  }

 private:
  MellinKernel() = default;

  std::string name_;
  KernelFamily family_ = BSplineFamily{2};
  std::optional<LogInterval> support_;
  double norm_constant_ = 1.0;
};

inline double eval_kernel(const MellinKernel& kernel, double w) { return kernel(w); }

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct Token {
  std::string text;
  std::size_t position;
};

inline std::vector<Token> split_spec(std::string_view spec) {
  std::vector<Token> tokens;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= spec.size(); ++i) {
    if (i == spec.size() || spec[i] == ':') {
      tokens.push_back({lower(spec.substr(start, i - start)), start});
      start = i + 1;
    }
  }
  return tokens;
}

inline double parse_real(const Token& tok) {
  if (tok.text == "pi") return std::numbers::pi;
  if (tok.text == "e") return std::numbers::e;
  double value = 0.0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || tok.text.empty() || !std::isfinite(value))
    throw ConfigError("expected a real number, got '" + tok.text + "'", tok.position);
  return value;
}

inline int parse_natural(const Token& tok) {
  int value = 0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || tok.text.empty())
    throw ConfigError("expected an integer, got '" + tok.text + "'", tok.position);
  return value;
}

}  // namespace detail

/// Parses `bspline:<order>`, `fejer:<beta>:<t>`, `jackson:<gamma>:<beta>`
/// (case-insensitive; `pi` accepted for reals).
inline MellinKernel parse_kernel_spec(std::string_view spec) {
  const auto tokens = detail::split_spec(spec);
  const auto& family = tokens.front();
  auto expect_args = [&](std::size_t n) {
    if (tokens.size() != n + 1)
      throw ConfigError("kernel '" + family.text + "' takes " + std::to_string(n) + " argument(s)",
                        tokens.size() > n + 1 ? tokens[n + 1].position : spec.size());
  };
  try {
    if (family.text == "bspline") {
      expect_args(1);
      return MellinKernel::bspline(detail::parse_natural(tokens[1]));
    }
    if (family.text == "fejer") {
      expect_args(2);
      return MellinKernel::fejer(detail::parse_real(tokens[1]), detail::parse_real(tokens[2]));
    }
    if (family.text == "jackson") {
      expect_args(2);
      return MellinKernel::jackson(detail::parse_real(tokens[1]), detail::parse_natural(tokens[2]));
    }
  } catch (const ConfigError& e) {
    if (e.position() != ConfigError::npos) throw;
    throw ConfigError(std::string(e.what()) + " in '" + std::string(spec) + "'", tokens[1].position);
  }
  throw ConfigError("unknown kernel family '" + family.text + "'", family.position);
}

}  // namespace expsamp
