#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "expsamp/kernels.hpp"
#include "expsamp/quadrature.hpp"

namespace expsamp {

/// Characteristic constants of a kernel.
struct KernelMetrics {
  double unit_mass = 0.0;  ///< K = int_1^e kernel(w) dw/w
  double theta = 0.0;      ///< infimum of the kernel over [1, e]
  /// sup_w max_k kernel(e^{-k} w) |k - log w|^r, r = 0, 1, 2
  std::array<double, 3> discrete_moment{};
  /// int kernel(w) |log w|^r dw/w over the support, r = 0, 1, 2 (+inf if divergent)
  std::array<double, 3> continuous_moment{};
  double l1_norm = 0.0;  ///< over the whole positive half-line w.r.t. dw/w
};

namespace detail {

// Golden-section minimisation of f on [lo, hi].
template <class F>
double golden_section_min(F&& f, double lo, double hi, double tol = 1e-13) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return std::min({f(a), f(b), fc, fd});
}

// Decay exponent of the kernel in |log w| (0 if it does not decay, e.g. Fejer t != 0).
inline double decay_power(const MellinKernel& k) {
  if (const auto* f = std::get_if<FejerFamily>(&k.family())) return f->t == 0.0 ? 2.0 : 0.0;
  if (const auto* j = std::get_if<JacksonFamily>(&k.family())) return 2.0 * j->beta;
  return std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Infimum of the kernel over log w in [0, 1]: a 10^4-point grid followed by
/// golden-section refinement around the best grid cell.
inline double kernel_theta(const MellinKernel& kernel) {
  constexpr int grid = 10'000;
  int best = 0;
  double best_value = kernel.at_log(0.0);
  for (int i = 1; i <= grid; ++i) {
    const double v = kernel.at_log(static_cast<double>(i) / grid);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double lo = static_cast<double>(std::max(best - 1, 0)) / grid;
  const double hi = static_cast<double>(std::min(best + 1, grid)) / grid;
  const double refined = detail::golden_section_min([&](double u) { return kernel.at_log(u); }, lo, hi);
  return std::max(0.0, std::min(best_value, refined));
}

/// Discrete absolute moment of order r. The map w -> {e^{-k} w} is 1-periodic
/// in log w, so the sup is taken over log w in [0, 1] on `grid_density` + 1
/// points. Unbounded kernels use the index window |k| <= 64 zero spacings.
inline double discrete_moment(const MellinKernel& kernel, int r, int grid_density) {
  double reach = 0.0;
  if (const auto s = kernel.log_support()) {
    reach = std::max(std::abs(s->lo), std::abs(s->hi));
  } else {
    reach = 64.0 * kernel.zero_spacing();
  }
  double sup = 0.0;
  for (int i = 0; i <= grid_density; ++i) {
    const double u = static_cast<double>(i) / grid_density;
    const auto k_lo = static_cast<long>(std::floor(u - reach));
    const auto k_hi = static_cast<long>(std::ceil(u + reach));
    for (long k = k_lo; k <= k_hi; ++k) {
      const double dist = std::abs(static_cast<double>(k) - u);
      const double v = kernel.at_log(u - static_cast<double>(k)) * (r == 0 ? 1.0 : std::pow(dist, r));
      sup = std::max(sup, v);
    }
  }
  return sup;
}

/// L1 norm of the kernel over (0, inf) w.r.t. dw/w.
inline double kernel_l1_norm(const MellinKernel& kernel, const QuadratureSpec& spec = {}) {
  if (const auto s = kernel.log_support())
    return integrate([&](double u) { return kernel.at_log(u); }, s->lo, s->hi, spec, kernel.log_knots(s->lo, s->hi))
        .value;
  if (const auto* f = std::get_if<FejerFamily>(&kernel.family())) {
    if (f->t != 0.0) return std::numeric_limits<double>::infinity();
    const double c = 2.0 * std::numbers::pi / f->beta;
    return f->beta / (2.0 * std::numbers::pi) * sinc_power_line_integral(c, 1, 1e-10, 1e-11).value;
  }
  const auto& j = std::get<JacksonFamily>(kernel.family());
  const double c = 2.0 * j.gamma * j.beta * std::numbers::pi;
  return kernel.norm_constant() * sinc_power_line_integral(c, j.beta, 1e-10, 1e-11).value;
}

/// Continuous absolute moment of order r over the kernel's support.
inline double continuous_moment(const MellinKernel& kernel, int r, const QuadratureSpec& spec = {}) {
  auto integrand = [&](double u) { return kernel.at_log(u) * (r == 0 ? 1.0 : std::pow(std::abs(u), r)); };
  if (const auto s = kernel.log_support()) {
    const auto knots = kernel.log_knots(s->lo, s->hi);
    return integrate(integrand, s->lo, s->hi, spec, knots).value;
  }
  const double decay = detail::decay_power(kernel);
  if (!(r + 1.0 < decay)) return std::numeric_limits<double>::infinity();
  if (r == 0) return kernel_l1_norm(kernel, spec);
  // Only Jackson kernels with beta >= 2 reach this point.
  const auto& j = std::get<JacksonFamily>(kernel.family());
  const double step = kernel.zero_spacing();
  const double envelope = kernel.norm_constant() * std::pow(2.0 * j.gamma * j.beta, decay);  // kernel <= env |u|^-decay
  const double exponent = decay - r - 1.0;
  // remainder of the averaged tail, as in sinc_power_line_integral
  constexpr double budget = 1e-7;
  const double coeff = 2.0 * envelope * (step * step / (2.0 * std::numbers::pi * std::numbers::pi)) * (decay - r);
  const double u_needed = std::pow(coeff / budget, 1.0 / (exponent + 1.0));
  const double upper = std::max(4.0, std::ceil(u_needed / step)) * step;
  const auto knots = kernel.log_knots(-upper, upper);
  const auto body = integrate(integrand, -upper, upper, spec, knots).value;
  const double mean = detail::binomial(static_cast<int>(decay), static_cast<int>(decay / 2)) / std::pow(2.0, decay);
  const double tail = 2.0 * mean * envelope * std::pow(upper, -exponent) / exponent;
  return body + tail;
}

inline KernelMetrics compute_metrics(const MellinKernel& kernel, int grid_density = 1000,
                                     const QuadratureSpec& spec = {}) {
  if (grid_density < 100) throw ConfigError("compute_metrics: grid_density must be >= 100");
  KernelMetrics m;
  const auto knots = kernel.log_knots(0.0, 1.0);
  m.unit_mass = integrate([&](double u) { return kernel.at_log(u); }, 0.0, 1.0, spec, knots).value;
  m.theta = kernel_theta(kernel);
  for (int r = 0; r < 3; ++r) {
    m.discrete_moment[static_cast<std::size_t>(r)] = discrete_moment(kernel, r, grid_density);
    m.continuous_moment[static_cast<std::size_t>(r)] = continuous_moment(kernel, r, spec);
  }
  m.l1_norm = kernel_l1_norm(kernel, spec);
  return m;
}

}  // namespace expsamp
