#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "expsamp/error.hpp"
#include "expsamp/function_handle.hpp"
#include "expsamp/kernels.hpp"
#include "expsamp/operators.hpp"

namespace expsamp {

inline constexpr std::size_t kOracleNodes = 1'000'000;

/// Reference evaluation of either operator written directly from the
/// definitions: every coefficient is a composite trapezoid sum in u = log v
/// over all of [log a, log b] with `subintervals` cells (no support
/// clipping, no memoisation), and both maxima are plain loops.
/// Deliberately slow; restricted to n <= 8.
inline double brute_force_oracle(OperatorKind kind, const FunctionHandle& h, const OperatorConfig& cfg, double w,
                                 std::size_t subintervals = kOracleNodes) {
  if (cfg.n > 8) throw ConfigError("brute_force_oracle: n must be <= 8");
  if (!(cfg.a > 0.0 && cfg.a < cfg.b)) throw ConfigError("brute_force_oracle: requires 0 < a < b");
  const int n = cfg.n;
  const double u0 = std::log(cfg.a);
  const double u1 = std::log(cfg.b);
  const double du = (u1 - u0) / static_cast<double>(subintervals);

  std::vector<double> phi_w, c_h, c_1;
  for (long k = static_cast<long>(std::ceil(n * u0)); k <= static_cast<long>(std::floor(n * u1)); ++k) {
    double sum_h = 0.0;
    double sum_1 = 0.0;
    for (std::size_t i = 0; i <= subintervals; ++i) {
      const double u = u0 + du * static_cast<double>(i);
      const double v = i == 0 ? cfg.a : (i == subintervals ? cfg.b : std::exp(u));
      const double weight = (i == 0 || i == subintervals) ? 0.5 : 1.0;
      const double psi = cfg.psi(std::exp(-static_cast<double>(k)) * std::pow(v, n));
      sum_h += weight * psi * h(v);
      sum_1 += weight * psi;
    }
    c_h.push_back(n * du * sum_h);
    c_1.push_back(n * du * sum_1);
    phi_w.push_back(cfg.phi(std::exp(-static_cast<double>(k)) * std::pow(w, n)));
  }
  if (phi_w.empty()) throw ConfigError("brute_force_oracle: empty index set");

  double denominator = phi_w[0] * c_1[0];
  for (std::size_t i = 1; i < phi_w.size(); ++i) denominator = std::max(denominator, phi_w[i] * c_1[i]);

  if (kind == OperatorKind::max_product) {
    double numerator = phi_w[0] * c_h[0];
    for (std::size_t i = 1; i < phi_w.size(); ++i) numerator = std::max(numerator, phi_w[i] * c_h[i]);
    return numerator / denominator;
  }
  double value = std::min(c_h[0], phi_w[0] / denominator);
  for (std::size_t i = 1; i < phi_w.size(); ++i) value = std::max(value, std::min(c_h[i], phi_w[i] / denominator));
  return value;
}

}  // namespace expsamp
