#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "expsamp/error.hpp"
#include "expsamp/harness.hpp"
#include "expsamp/kernels.hpp"
#include "expsamp/operators.hpp"
#include "expsamp/orlicz.hpp"

namespace expsamp {

enum class OutputFormat { csv, json };

inline const char* to_string(OutputFormat f) noexcept { return f == OutputFormat::csv ? "csv" : "json"; }

inline OutputFormat parse_output_format(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ConfigError("unknown output format '" + std::string(s) + "'");
}

struct ExperimentConfig {
  OperatorKind op = OperatorKind::max_product;
  std::string phi = "bspline:2";
  std::string psi = "jackson:1.05:1";
  std::vector<int> n_list = kTableOrders;
  double a = kDefaultA;
  double b = kDefaultB;
  std::vector<double> points = kTablePoints;
  int grid = 400;
  std::string function = "h1";
  std::optional<std::string> phi_function;
  std::optional<double> lambda;
  double quad_tol = 1e-10;
  std::string output;  // empty: stdout
  OutputFormat format = OutputFormat::csv;

  bool operator==(const ExperimentConfig&) const = default;

  QuadratureSpec quadrature() const {
    QuadratureSpec q;
    q.abs_tol = quad_tol;
    return q;
  }

  void validate() const {
    if (n_list.empty()) throw ConfigError("n list is empty");
    for (int n : n_list)
      if (n < 1) throw ConfigError("n values must be >= 1");
    if (!(a > 0.0) || !(b > a) || !std::isfinite(b)) throw ConfigError("interval requires 0 < a < b");
    const int n_min = *std::min_element(n_list.begin(), n_list.end());
    if (!(n_min * std::log(b / a) > 1.0 + 1e-12)) throw ConfigError("interval requires b/a > e^{1/min(n)}");
    if (grid < 2) throw ConfigError("grid density must be >= 2");
    if (!(quad_tol > 0.0)) throw ConfigError("quad_tol must be positive");
    if (lambda && !(*lambda > 0.0)) throw ConfigError("lambda must be positive");
    parse_kernel_spec(phi);
    parse_kernel_spec(psi);
    if (phi_function) parse_phi_function(*phi_function);
  }
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["operator"] = to_string(c.op);
  j["phi"] = c.phi;
  j["psi"] = c.psi;
  j["n_list"] = c.n_list;
  j["interval"] = {c.a, c.b};
  j["points"] = c.points;
  j["grid"] = c.grid;
  j["test_function"] = c.function;
  j["phi_function"] = c.phi_function ? nlohmann::json(*c.phi_function) : nlohmann::json(nullptr);
  j["lambda"] = c.lambda ? nlohmann::json(*c.lambda) : nlohmann::json(nullptr);
  j["quad_tol"] = c.quad_tol;
  j["output"] = {{"path", c.output}, {"format", to_string(c.format)}};
  return j;
}

/// Fields absent from `j` keep the values already in `base`.
inline ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {}) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  try {
    if (j.contains("operator")) base.op = parse_operator_kind(j.at("operator").get<std::string>());
    if (j.contains("phi")) base.phi = j.at("phi").get<std::string>();
    if (j.contains("psi")) base.psi = j.at("psi").get<std::string>();
    if (j.contains("n_list")) base.n_list = j.at("n_list").get<std::vector<int>>();
    if (j.contains("interval")) {
      const auto iv = j.at("interval").get<std::vector<double>>();
      if (iv.size() != 2) throw ConfigError("config: interval must have two entries");
      base.a = iv[0];
      base.b = iv[1];
    }
    if (j.contains("points")) base.points = j.at("points").get<std::vector<double>>();
    if (j.contains("grid")) base.grid = j.at("grid").get<int>();
    if (j.contains("test_function")) base.function = j.at("test_function").get<std::string>();
    if (j.contains("phi_function")) {
      const auto& v = j.at("phi_function");
      base.phi_function = v.is_null() ? std::nullopt : std::optional(v.get<std::string>());
    }
    if (j.contains("lambda")) {
      const auto& v = j.at("lambda");
      base.lambda = v.is_null() ? std::nullopt : std::optional(v.get<double>());
    }
    if (j.contains("quad_tol")) base.quad_tol = j.at("quad_tol").get<double>();
    if (j.contains("output")) {
      const auto& o = j.at("output");
      if (o.contains("path")) base.output = o.at("path").get<std::string>();
      if (o.contains("format")) base.format = parse_output_format(o.at("format").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return base;
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return config_from_json(j, std::move(base));
}

}  // namespace expsamp
