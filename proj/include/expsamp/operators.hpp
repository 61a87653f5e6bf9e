#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "expsamp/error.hpp"
#include "expsamp/function_handle.hpp"
#include "expsamp/kernels.hpp"
#include "expsamp/quadrature.hpp"

namespace expsamp {

enum class OperatorKind { max_product, max_min };

inline const char* to_string(OperatorKind kind) noexcept {
  return kind == OperatorKind::max_product ? "max_product" : "max_min";
}

inline OperatorKind parse_operator_kind(std::string_view s) {
  if (s == "max_product" || s == "maxproduct" || s == "max-product") return OperatorKind::max_product;
  if (s == "max_min" || s == "maxmin" || s == "max-min") return OperatorKind::max_min;
  throw ConfigError("unknown operator '" + std::string(s) + "'");
}

/// Integers ceil(n log a), ..., floor(n log b); empty when the ceiling exceeds the floor.
inline std::vector<long> index_set(int n, double a, double b) {
  if (!(a > 0.0) || !(a < b)) throw DomainError("index_set: requires 0 < a < b");
  const auto first = static_cast<long>(std::ceil(n * std::log(a)));
  const auto last = static_cast<long>(std::floor(n * std::log(b)));
  std::vector<long> out;
  for (long k = first; k <= last; ++k) out.push_back(k);
  return out;
}

struct OperatorConfig {
  MellinKernel phi;
  MellinKernel psi;
  int n = 1;
  double a = 0.25;
  double b = 3.0;
  QuadratureSpec quad{};

  /// b/a > e^{1/n}; the strict inequality is checked with a 1e-12 margin.
  bool ratio_condition() const noexcept { return n * std::log(b / a) > 1.0 + 1e-12; }

  void validate() const {
    if (n < 1) throw ConfigError("operator order n must be >= 1");
    if (!(a > 0.0) || !std::isfinite(b) || !(a < b)) throw ConfigError("operator interval requires 0 < a < b");
    if (!ratio_condition()) throw ConfigError("operator interval requires b/a > e^{1/n}");
    if (index_set(n, a, b).empty()) throw ConfigError("operator index set is empty");
    quad.validate();
  }
};

struct OperatorEvaluation {
  double value = 0.0;
  double numerator = 0.0;  // max-product numerator; unused (0) for max-min
  double denominator = 0.0;
  long active_index = 0;  // smallest k attaining the denominator maximum
  bool skipped = false;
  std::string skip_reason;
  bool outside_guarantee_range = false;  // max-min only: h not within [0, 1]
};

inline constexpr double kDegenerateDenominator = 1e-300;

/// Durrmeyer coefficient n int_a^b psi(e^{-k} v^n) h(v) dv/v, with h == 1 when
/// `h` is null. Computed as int psi(e^t) h(e^{(t+k)/n}) dt over
/// t in [n log a - k, n log b - k], clipped to the support of psi.
inline double durrmeyer_coefficient(const MellinKernel& psi, long k, int n, double a, double b,
                                    const FunctionHandle* h, const QuadratureSpec& spec = {}) {
  if (!(a > 0.0) || !(a < b)) throw DomainError("durrmeyer_coefficient: requires 0 < a < b");
  if (n < 1) throw DomainError("durrmeyer_coefficient: requires n >= 1");
  const double shift = static_cast<double>(k);
  double lo = n * std::log(a) - shift;
  double hi = n * std::log(b) - shift;
  if (const auto s = psi.log_support()) {
    lo = std::max(lo, s->lo);
    hi = std::min(hi, s->hi);
  }
  if (!(lo < hi)) return 0.0;
  auto breaks = psi.log_knots(lo, hi);
  if (h) {
    for (double bp : h->breakpoints())
      if (bp > 0.0) breaks.push_back(n * std::log(bp) - shift);
    auto integrand = [&](double t) {
      const double v = std::clamp(std::exp((t + shift) / n), a, b);
      return psi.at_log(t) * (*h)(v);
    };
    return integrate(integrand, lo, hi, spec, breaks).value;
  }
  return integrate([&](double t) { return psi.at_log(t); }, lo, hi, spec, breaks).value;
}

inline double durrmeyer_coefficient(const MellinKernel& psi, long k, int n, double a, double b,
                                    const FunctionHandle& h, const QuadratureSpec& spec = {}) {
  return durrmeyer_coefficient(psi, k, n, a, b, &h, spec);
}

class BoundOperator;

/// Operator for a fixed (phi, psi, n, [a, b]). The unit coefficients C_k(1)
/// are computed once at construction; afterwards every method is const and
/// safe to call concurrently.
class SamplingOperator {
 public:
  explicit SamplingOperator(OperatorConfig cfg) {
    cfg.validate();
    auto shared = std::make_shared<Shared>(Shared{std::move(cfg), {}, {}});
    shared->indices = index_set(shared->cfg.n, shared->cfg.a, shared->cfg.b);
    shared->unit.reserve(shared->indices.size());
    for (long k : shared->indices)
      shared->unit.push_back(durrmeyer_coefficient(shared->cfg.psi, k, shared->cfg.n, shared->cfg.a, shared->cfg.b,
                                                   nullptr, shared->cfg.quad));
    shared_ = std::move(shared);
  }

  const OperatorConfig& config() const noexcept { return shared_->cfg; }
  std::span<const long> indices() const noexcept { return shared_->indices; }
  std::span<const double> unit_coefficients() const noexcept { return shared_->unit; }

  /// Computes C_k(h) for every k in the index set.
  BoundOperator bind(const FunctionHandle& h) const;

 private:
  friend class BoundOperator;
  struct Shared {
    OperatorConfig cfg;
    std::vector<long> indices;
    std::vector<double> unit;
  };
  std::shared_ptr<const Shared> shared_;
};

/// A SamplingOperator together with the coefficients C_k(h) of one function.
class BoundOperator {
 public:
  const OperatorConfig& config() const noexcept { return base_->cfg; }
  std::span<const double> coefficients() const noexcept { return coefficients_; }
  bool within_guarantee_range() const noexcept { return in_unit_range_; }

  OperatorEvaluation evaluate(OperatorKind kind, double w) const {
    return kind == OperatorKind::max_product ? max_product(w) : max_min(w);
  }

  OperatorEvaluation max_product(double w) const {
    OperatorEvaluation ev;
    const auto weights = kernel_weights(w);
    bool first = true;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const double num = weights[i] * coefficients_[i];
      const double den = weights[i] * base_->unit[i];
      if (first || num > ev.numerator) ev.numerator = num;
      if (first || den > ev.denominator) {
        ev.denominator = den;
        ev.active_index = base_->indices[i];
      }
      first = false;
    }
    if (!(ev.denominator >= kDegenerateDenominator)) return skip(ev);
    ev.value = ev.numerator / ev.denominator;
    return ev;
  }

  OperatorEvaluation max_min(double w) const {
    OperatorEvaluation ev;
    ev.outside_guarantee_range = !in_unit_range_;
    const auto weights = kernel_weights(w);
    bool first = true;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const double den = weights[i] * base_->unit[i];
      if (first || den > ev.denominator) {
        ev.denominator = den;
        ev.active_index = base_->indices[i];
      }
      first = false;
    }
    if (!(ev.denominator >= kDegenerateDenominator)) return skip(ev);
    first = true;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const double term = std::min(coefficients_[i], weights[i] / ev.denominator);
      if (first || term > ev.value) ev.value = term;
      first = false;
    }
    return ev;
  }

 private:
  friend class SamplingOperator;
  BoundOperator(std::shared_ptr<const SamplingOperator::Shared> base, std::vector<double> coefficients,
                bool in_unit_range)
      : base_(std::move(base)), coefficients_(std::move(coefficients)), in_unit_range_(in_unit_range) {}

  // phi(e^{-k} w^n) for k in the index set
  std::vector<double> kernel_weights(double w) const {
    const auto& cfg = base_->cfg;
    if (!std::isfinite(w) || !(w > 0.0)) throw DomainError("operator evaluation requires finite w > 0");
    const double nu = cfg.n * std::log(w);
    std::vector<double> out(base_->indices.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = cfg.phi.at_log(nu - static_cast<double>(base_->indices[i]));
    return out;
  }

  static OperatorEvaluation skip(OperatorEvaluation ev) {
    ev.skipped = true;
    ev.skip_reason = "degenerate denominator";
    ev.value = std::nan("");
    return ev;
  }

  std::shared_ptr<const SamplingOperator::Shared> base_;
  std::vector<double> coefficients_;
  bool in_unit_range_;
};

inline BoundOperator SamplingOperator::bind(const FunctionHandle& h) const {
  const auto& cfg = shared_->cfg;
  std::vector<double> coefficients;
  coefficients.reserve(shared_->indices.size());
  for (long k : shared_->indices)
    coefficients.push_back(durrmeyer_coefficient(cfg.psi, k, cfg.n, cfg.a, cfg.b, &h, cfg.quad));
  bool in_range = false;
  if (const auto& r = h.declared_range()) {
    in_range = r->lo >= 0.0 && r->hi <= 1.0;
  } else {
    in_range = h.range_within(cfg.a, cfg.b, 0.0, 1.0);
  }
  return BoundOperator(shared_, std::move(coefficients), in_range);
}

/// One-shot max-product evaluation (no reuse of coefficients).
inline OperatorEvaluation max_product_eval(const FunctionHandle& h, const OperatorConfig& cfg, double w) {
  return SamplingOperator(cfg).bind(h).max_product(w);
}

/// One-shot max-min evaluation (no reuse of coefficients).
inline OperatorEvaluation max_min_eval(const FunctionHandle& h, const OperatorConfig& cfg, double w) {
  return SamplingOperator(cfg).bind(h).max_min(w);
}

}  // namespace expsamp
