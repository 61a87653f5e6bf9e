#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <queue>
#include <span>
#include <vector>

#include "expsamp/error.hpp"

namespace expsamp {

/// Tolerances for the adaptive panel rule.
struct QuadratureSpec {
  double abs_tol = 1e-10;
  int max_depth = 30;
  int panel_nodes = 16;

  void validate() const {
    if (!(abs_tol > 0.0)) throw ConfigError("quadrature abs_tol must be positive");
    if (max_depth < 4) throw ConfigError("quadrature max_depth must be at least 4");
    if (panel_nodes < 8) throw ConfigError("quadrature panel_nodes must be at least 8");
  }
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;
};

namespace detail {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Newton iteration on P_m from the Chebyshev-like initial guesses.
inline GaussRule make_gauss_legendre(int m) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(m));
  rule.weights.resize(static_cast<std::size_t>(m));
  const int half = (m + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 0; j < m; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      dp = m * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -z;
    rule.nodes[static_cast<std::size_t>(m - 1 - i)] = z;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(m - 1 - i)] = w;
  }
  return rule;
}

inline constexpr int kMaxCachedRule = 64;

inline const GaussRule& gauss_legendre(int m) {
  static const std::array<GaussRule, kMaxCachedRule + 1> table = [] {
    std::array<GaussRule, kMaxCachedRule + 1> t{};
    for (int k = 1; k <= kMaxCachedRule; ++k) t[static_cast<std::size_t>(k)] = make_gauss_legendre(k);
    return t;
  }();
  if (m < 1 || m > kMaxCachedRule) throw ConfigError("panel_nodes must be in [8, 64]");
  return table[static_cast<std::size_t>(m)];
}

template <class F>
double apply_rule(const GaussRule& rule, F& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

struct Panel {
  double lo;
  double hi;
  double left;   // rule applied to [lo, mid]
  double right;  // rule applied to [mid, hi]
  double error;
  int depth;
};

struct PanelOrder {
  bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

}  // namespace detail

/// Globally adaptive Gauss-Legendre integration of f over [lo, hi].
///
/// The interval is first cut at every entry of `breaks` inside (lo, hi); the
/// panel with the largest estimated error is bisected until the summed
/// estimate is at most `spec.abs_tol`. Panel error is |G(P) - G(P_l) - G(P_r)|.
/// Integrands with jumps must declare them in `breaks`.
template <class F>
QuadratureResult integrate(F&& f, double lo, double hi, const QuadratureSpec& spec = {},
                           std::span<const double> breaks = {}) {
  spec.validate();
  if (!(lo <= hi)) throw DomainError("integrate: lower limit exceeds upper limit");
  QuadratureResult result;
  if (lo == hi) return result;

  const auto& rule = detail::gauss_legendre(spec.panel_nodes);

  std::vector<double> cuts;
  cuts.reserve(breaks.size() + 2);
  cuts.push_back(lo);
  for (double x : breaks)
    if (x > lo && x < hi) cuts.push_back(x);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto make_panel = [&](double a, double b, double whole, int depth) {
    const double m = 0.5 * (a + b);
    const double l = detail::apply_rule(rule, f, a, m);
    const double r = detail::apply_rule(rule, f, m, b);
    return detail::Panel{a, b, l, r, std::abs(whole - l - r), depth};
  };

  std::priority_queue<detail::Panel, std::vector<detail::Panel>, detail::PanelOrder> active;
  std::vector<detail::Panel> settled;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double whole = detail::apply_rule(rule, f, cuts[i], cuts[i + 1]);
    auto p = make_panel(cuts[i], cuts[i + 1], whole, 0);
    total_error += p.error;
    active.push(p);
  }

  while (total_error > spec.abs_tol && !active.empty()) {
    detail::Panel worst = active.top();
    active.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (worst.depth >= spec.max_depth || !(mid > worst.lo && mid < worst.hi)) {
      settled.push_back(worst);
      continue;
    }
    auto left = make_panel(worst.lo, mid, worst.left, worst.depth + 1);
    auto right = make_panel(mid, worst.hi, worst.right, worst.depth + 1);
    total_error += left.error + right.error - worst.error;
    active.push(left);
    active.push(right);
  }

  double value = 0.0;
  double error = 0.0;
  auto accumulate = [&](const detail::Panel& p) {
    value += p.left + p.right;
    error += p.error;
    ++result.panels;
  };
  for (const auto& p : settled) accumulate(p);
  while (!active.empty()) {
    accumulate(active.top());
    active.pop();
  }
  result.value = value;
  result.error = error;
  if (!std::isfinite(value)) throw ConvergenceError("integrate: non-finite integrand", value, error);
  if (error > spec.abs_tol)
    throw ConvergenceError("integrate: max_depth reached before abs_tol", value, error);
  return result;
}

/// Integral of f(v) dv/v over [a, b] using u = log v. `breaks` are given in v.
template <class F>
QuadratureResult mellin_integrate_detailed(F&& f, double a, double b, const QuadratureSpec& spec = {},
                                           std::span<const double> breaks = {}) {
  if (!(a > 0.0) || !(a < b) || !std::isfinite(b))
    throw DomainError("mellin_integrate: requires 0 < a < b < inf");
  std::vector<double> log_breaks;
  log_breaks.reserve(breaks.size());
  for (double v : breaks)
    if (v > 0.0) log_breaks.push_back(std::log(v));
  return integrate([&f](double u) { return f(std::exp(u)); }, std::log(a), std::log(b), spec, log_breaks);
}

template <class F>
double mellin_integrate(F&& f, double a, double b, const QuadratureSpec& spec = {},
                        std::span<const double> breaks = {}) {
  return mellin_integrate_detailed(std::forward<F>(f), a, b, spec, breaks).value;
}

}  // namespace expsamp
