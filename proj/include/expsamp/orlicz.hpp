#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "expsamp/error.hpp"
#include "expsamp/function_handle.hpp"
#include "expsamp/kernels.hpp"
#include "expsamp/operators.hpp"
#include "expsamp/properties.hpp"
#include "expsamp/quadrature.hpp"

namespace expsamp {

/// v^p, p > 1
struct PowerPhi {
  double p;
};
/// e^{v^alpha} - 1, alpha > 0
struct ExpPowerPhi {
  double alpha;
};
/// v^alpha log^beta(v + 1), alpha >= 1, beta > 0
struct PowerLogPhi {
  double alpha;
  double beta;
};

enum class Delta2 { holds, fails, unknown };

inline constexpr double kExpPowerExponentLimit = 700.0;

/// A convex phi-function (Orlicz gauge).
class PhiFunction {
 public:
  using Family = std::variant<PowerPhi, ExpPowerPhi, PowerLogPhi>;

  static PhiFunction power(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("power phi-function requires p > 1");
    return PhiFunction(PowerPhi{p}, "power:" + detail::format_number(p));
  }
  static PhiFunction exp_power(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("exppower phi-function requires alpha > 0");
    return PhiFunction(ExpPowerPhi{alpha}, "exppower:" + detail::format_number(alpha));
  }
  static PhiFunction power_log(double alpha, double beta) {
    if (!(alpha >= 1.0) || !(beta > 0.0)) throw ConfigError("powerlog phi-function requires alpha >= 1, beta > 0");
    return PhiFunction(PowerLogPhi{alpha, beta},
                       "powerlog:" + detail::format_number(alpha) + ":" + detail::format_number(beta));
  }

  const Family& family() const noexcept { return family_; }
  const std::string& name() const noexcept { return name_; }

  Delta2 delta2() const noexcept { return std::holds_alternative<ExpPowerPhi>(family_) ? Delta2::fails : Delta2::holds; }

  /// M with phi(2v) <= M phi(v), when the condition holds.
  std::optional<double> delta2_constant() const noexcept {
    if (const auto* p = std::get_if<PowerPhi>(&family_)) return std::pow(2.0, p->p);
    if (const auto* pl = std::get_if<PowerLogPhi>(&family_)) return std::pow(2.0, pl->alpha + pl->beta);
    return std::nullopt;
  }

  /// phi(v) for v >= 0. Throws OverflowError when exp_power's exponent exceeds 700.
  double operator()(double v) const {
    if (v < 0.0) throw DomainError("phi-function evaluated at a negative argument");
    if (const auto* p = std::get_if<PowerPhi>(&family_)) return std::pow(v, p->p);
    if (const auto* e = std::get_if<ExpPowerPhi>(&family_)) {
      const double x = std::pow(v, e->alpha);
      if (x > kExpPowerExponentLimit)
        throw OverflowError("exppower phi-function overflow at argument " + std::to_string(v));
      return std::expm1(x);
    }
    const auto& pl = std::get<PowerLogPhi>(family_);
    return std::pow(v, pl.alpha) * std::pow(std::log1p(v), pl.beta);
  }

  /// log phi(v) for v > 0, finite where phi itself would overflow.
  double log_value(double v) const {
    if (!(v > 0.0)) return -std::numeric_limits<double>::infinity();
    if (const auto* p = std::get_if<PowerPhi>(&family_)) return p->p * std::log(v);
    if (const auto* e = std::get_if<ExpPowerPhi>(&family_)) {
      const double x = std::pow(v, e->alpha);
      return x > 30.0 ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x));
    }
    const auto& pl = std::get<PowerLogPhi>(family_);
    return pl.alpha * std::log(v) + pl.beta * std::log(std::log1p(v));
  }

 private:
  PhiFunction(Family f, std::string name) : family_(f), name_(std::move(name)) {}
  Family family_;
  std::string name_;
};

/// Parses `power:<p>`, `exppower:<alpha>`, `powerlog:<alpha>:<beta>`.
inline PhiFunction parse_phi_function(std::string_view spec) {
  const auto tokens = detail::split_spec(spec);
  const auto& family = tokens.front();
  auto expect_args = [&](std::size_t n) {
    if (tokens.size() != n + 1)
      throw ConfigError("phi-function '" + family.text + "' takes " + std::to_string(n) + " argument(s)",
                        tokens.size() > n + 1 ? tokens[n + 1].position : spec.size());
  };
  if (family.text == "power") {
    expect_args(1);
    return PhiFunction::power(detail::parse_real(tokens[1]));
  }
  if (family.text == "exppower") {
    expect_args(1);
    return PhiFunction::exp_power(detail::parse_real(tokens[1]));
  }
  if (family.text == "powerlog") {
    expect_args(2);
    return PhiFunction::power_log(detail::parse_real(tokens[1]), detail::parse_real(tokens[2]));
  }
  throw ConfigError("unknown phi-function family '" + family.text + "'", family.position);
}

struct ModularReport {
  double modular_value = 0.0;
  double lambda = 1.0;
  double a = 0.0;
  double b = 0.0;
  int n = 0;                     // operator order for convergence series, 0 otherwise
  std::size_t skipped_nodes = 0; // operator nodes with a degenerate denominator
};

namespace detail {

template <class F>
double modular_integral(const PhiFunction& phi, F&& g, double a, double b, double lambda, const QuadratureSpec& spec,
                        std::span<const double> breaks) {
  try {
    return mellin_integrate([&](double w) { return phi(lambda * std::abs(g(w))); }, a, b, spec, breaks);
  } catch (const OverflowError& e) {
    std::ostringstream os;
    os.precision(17);
    os << "modular overflow with lambda=" << lambda << ": " << e.what();
    throw OverflowError(os.str());
  }
}

}  // namespace detail

/// I[lambda h] = int_a^b phi(lambda |h(w)|) dw/w.
inline ModularReport modular(const PhiFunction& phi, const FunctionHandle& h, double a, double b, double lambda = 1.0,
                             const QuadratureSpec& spec = {}) {
  if (!(lambda > 0.0)) throw ConfigError("modular: lambda must be positive");
  ModularReport r;
  r.lambda = lambda;
  r.a = a;
  r.b = b;
  r.modular_value = detail::modular_integral(phi, h, a, b, lambda, spec, h.breakpoints());
  return r;
}

/// inf{l > 0 : I[h / l] <= 1} by bisection. The bracket grows geometrically
/// from 1; the returned value is the feasible end of the final bracket.
inline double luxemburg_norm(const PhiFunction& phi, const FunctionHandle& h, double a, double b, double tol = 1e-9,
                             const QuadratureSpec& spec = {}) {
  if (!(tol > 0.0)) throw ConfigError("luxemburg_norm: tol must be positive");
  const auto probe = h.probe_range(a, b);
  if (probe.lo == 0.0 && probe.hi == 0.0) return 0.0;

  auto value_at = [&](double ell) {
    try {
      return modular(phi, h, a, b, 1.0 / ell, spec).modular_value;
    } catch (const OverflowError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  constexpr double kLimit = 18446744073709551616.0;  // 2^64
  double lo = 1.0, hi = 1.0;
  if (value_at(1.0) > 1.0) {
    while (value_at(hi) > 1.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > kLimit) throw ConvergenceError("luxemburg_norm: unbounded norm", hi, hi);
    }
  } else {
    while (value_at(lo) <= 1.0) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1.0 / kLimit) return hi;
    }
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (value_at(mid) <= 1.0) hi = mid;
    else lo = mid;
  }
  return hi;
}

struct Delta2Report {
  std::string phi;
  Delta2 declared = Delta2::unknown;
  std::optional<double> declared_constant;
  std::vector<double> grid;
  std::vector<double> log_ratio;  // log(phi(2v) / phi(v))
  double sup_ratio = 0.0;         // may be +inf
  bool bounded_by_declared = false;
  bool diverging = false;  // ratio increases along the upper half of the grid
};

/// sup over the grid of phi(2v)/phi(v), computed in log space.
inline Delta2Report delta2_probe(const PhiFunction& phi, const std::vector<double>& v_grid) {
  if (v_grid.empty()) throw ConfigError("delta2_probe: empty grid");
  Delta2Report r;
  r.phi = phi.name();
  r.declared = phi.delta2();
  r.declared_constant = phi.delta2_constant();
  r.grid = v_grid;
  double sup_log = -std::numeric_limits<double>::infinity();
  for (double v : v_grid) {
    const double lr = phi.log_value(2.0 * v) - phi.log_value(v);
    r.log_ratio.push_back(lr);
    sup_log = std::max(sup_log, lr);
  }
  r.sup_ratio = std::exp(sup_log);
  if (r.declared_constant) r.bounded_by_declared = sup_log <= std::log(*r.declared_constant) + 1e-12;
  const std::size_t half = r.log_ratio.size() / 2;
  r.diverging = r.log_ratio.size() >= 4;
  for (std::size_t i = half + 1; i < r.log_ratio.size(); ++i)
    if (!(r.log_ratio[i] > r.log_ratio[i - 1])) r.diverging = false;
  return r;
}

/// `points` log-spaced values on [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1)));
  return g;
}

/// Randomised checks, for nonnegative finite sequences A, of
///   phi(max A) <= max phi(2 A)   and   phi(max A) == max phi(A).
inline std::vector<PropertyReport> jensen_max_checks(const PhiFunction& phi, unsigned long long seed,
                                                     std::size_t cases, double magnitude = 4.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> value(0.0, magnitude);
  std::uniform_int_distribution<int> length(1, 32);
  std::vector<PropertyReport> reports(2);
  reports[0].name = "phi(max A) <= max phi(2A)";
  reports[1].name = "phi(max A) == max phi(A)";
  for (std::size_t c = 0; c < cases; ++c) {
    std::vector<double> a(static_cast<std::size_t>(length(rng)));
    for (auto& x : a) x = value(rng);
    if (c % 11 == 0) a.front() = 0.0;
    const double top = phi(*std::max_element(a.begin(), a.end()));
    double doubled = 0.0, plain = 0.0;
    for (double x : a) {
      doubled = std::max(doubled, phi(2.0 * x));
      plain = std::max(plain, phi(x));
    }
    detail::record(reports[0], top <= doubled, "A=" + detail::describe(a));
    detail::record(reports[1], top == plain, "A=" + detail::describe(a));
  }
  return reports;
}

/// Operator knots (phi knots shifted to every k) in v, plus the breakpoints of h.
inline std::vector<double> operator_breakpoints(const OperatorConfig& cfg, const FunctionHandle& h) {
  std::vector<double> out(h.breakpoints());
  const auto ks = index_set(cfg.n, cfg.a, cfg.b);
  const double lo = cfg.n * std::log(cfg.a), hi = cfg.n * std::log(cfg.b);
  for (long k : ks) {
    for (double s : cfg.phi.log_knots(lo - static_cast<double>(k), hi - static_cast<double>(k)))
      out.push_back(std::exp((s + static_cast<double>(k)) / cfg.n));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double x, double y) { return std::abs(x - y) <= 1e-14 * y; }),
            out.end());
  return out;
}

/// I[lambda (D_n h - h)] over [a, b] for each n. Nodes where the operator is
/// skipped contribute 0 and are counted.
inline std::vector<ModularReport> modular_convergence_series(const PhiFunction& phi, OperatorKind kind,
                                                             const FunctionHandle& h,
                                                             const OperatorConfig& cfg_template,
                                                             const std::vector<int>& n_list, double lambda = 1.0) {
  if (!(lambda > 0.0)) throw ConfigError("modular_convergence_series: lambda must be positive");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1]) throw ConfigError("modular_convergence_series: n_list must be increasing");
  std::vector<ModularReport> series;
  for (int n : n_list) {
    OperatorConfig cfg = cfg_template;
    cfg.n = n;
    const auto bound = SamplingOperator(cfg).bind(h);
    std::size_t skipped = 0;
    auto difference = [&](double w) {
      const auto ev = bound.evaluate(kind, w);
      if (ev.skipped) {
        ++skipped;
        return 0.0;
      }
      return ev.value - h(w);
    };
    const auto breaks = operator_breakpoints(cfg, h);
    ModularReport r;
    r.lambda = lambda;
    r.a = cfg.a;
    r.b = cfg.b;
    r.n = n;
    r.modular_value = detail::modular_integral(phi, difference, cfg.a, cfg.b, lambda, cfg.quad, breaks);
    r.skipped_nodes = skipped;
    series.push_back(r);
  }
  return series;
}

}  // namespace expsamp
