#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "expsamp/error.hpp"
#include "expsamp/function_handle.hpp"

namespace expsamp {

enum class TestFunction { h1, h2 };

/// Smooth oscillatory signal: L / (1 + L), L = log(1 + e^{0.8 w cos(2 pi w)}).
inline double smooth_oscillatory(double w) {
  const double x = 0.8 * w * std::cos(2.0 * std::numbers::pi * w);
  const double l = x > 30.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  return l / (1.0 + l);
}

/// Five-piece signal on [0, 3] with jumps at 1.2, 1.8, 2.4 and a kink at 0.6.
/// Pieces are closed on the left.
inline double piecewise_signal(double w) {
  if (!(w >= 0.0 && w <= 3.0)) throw DomainError("piecewise signal is defined on [0, 3] only");
  const double s = 1.0 + 5.0 / 3.0 * w;
  if (w < 0.6) return s * s * s / 8.0;
  if (w < 1.2) return 3.0 - s;
  if (w < 1.8) return 0.4;
  if (w < 2.4) return 0.8;
  const double r = s - 6.0;
  return (r * r * r + 1.0) / 3.0;
}

inline double eval_test_function(TestFunction which, double w) {
  return which == TestFunction::h1 ? smooth_oscillatory(w) : piecewise_signal(w);
}

inline FunctionHandle test_function(TestFunction which) {
  if (which == TestFunction::h1) return FunctionHandle("h1", 0.0, 3.0, smooth_oscillatory, {}, ValueRange{0.0, 1.0});
  return FunctionHandle("h2", 0.0, 3.0, piecewise_signal, {0.6, 1.2, 1.8, 2.4}, ValueRange{0.0, 1.0});
}

inline TestFunction parse_test_function(std::string_view s) {
  if (s == "h1") return TestFunction::h1;
  if (s == "h2") return TestFunction::h2;
  throw ConfigError("unknown test function '" + std::string(s) + "'");
}

/// Piecewise-linear interpolant through (w, value) samples, constant beyond the ends.
inline FunctionHandle sampled_function(std::string name, std::vector<double> ws, std::vector<double> vs) {
  if (ws.size() < 2 || ws.size() != vs.size()) throw ConfigError("sampled function needs >= 2 (w, value) pairs");
  for (std::size_t i = 1; i < ws.size(); ++i)
    if (!(ws[i] > ws[i - 1])) throw ConfigError("sampled function abscissae must be increasing");
  auto eval = [ws, vs](double w) {
    if (w <= ws.front()) return vs.front();
    if (w >= ws.back()) return vs.back();
    const auto it = std::upper_bound(ws.begin(), ws.end(), w);
    const auto i = static_cast<std::size_t>(it - ws.begin());
    const double t = (w - ws[i - 1]) / (ws[i] - ws[i - 1]);
    return vs[i - 1] + t * (vs[i] - vs[i - 1]);
  };
  const auto [lo, hi] = std::minmax_element(vs.begin(), vs.end());
  const ValueRange range{*lo, *hi};
  const double a = ws.front(), b = ws.back();
  return FunctionHandle(std::move(name), a, b, eval, ws, range);
}

/// Reads a two-column CSV `w,value` (an optional non-numeric header line is skipped).
inline FunctionHandle load_sampled_function(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open function file '" + path + "'");
  std::vector<double> ws, vs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ','))
      throw ConfigError("function file '" + path + "': malformed line " + std::to_string(line_no));
    try {
      std::size_t used_a = 0, used_b = 0;
      const double w = std::stod(a, &used_a);
      const double v = std::stod(b, &used_b);
      ws.push_back(w);
      vs.push_back(v);
    } catch (const std::exception&) {
      if (line_no == 1) continue;
      throw ConfigError("function file '" + path + "': malformed line " + std::to_string(line_no));
    }
  }
  return sampled_function("file:" + path, std::move(ws), std::move(vs));
}

/// `h1`, `h2`, `const:<c>` or `file:<path>`.
inline FunctionHandle resolve_function(std::string_view spec) {
  if (spec.starts_with("file:")) return load_sampled_function(std::string(spec.substr(5)));
  if (spec.starts_with("const:")) {
    try {
      return FunctionHandle::constant(std::stod(std::string(spec.substr(6))));
    } catch (const std::invalid_argument&) {
      throw ConfigError("malformed constant function '" + std::string(spec) + "'", 6);
    }
  }
  return test_function(parse_test_function(spec));
}

}  // namespace expsamp
