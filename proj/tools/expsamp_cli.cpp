#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "expsamp/config.hpp"
#include "expsamp/expsamp.hpp"

namespace {

using expsamp::ExperimentConfig;
using json = nlohmann::json;

constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFailure = 3;

struct UsageError : expsamp::ConfigError {
  using ConfigError::ConfigError;
};

// Raw flag values; folded into an ExperimentConfig after parsing.
struct Flags {
  std::string op = "max_product";
  std::string phi = "bspline:2";
  std::string psi = "jackson:1.05:1";
  std::vector<std::string> n_list{"17", "26", "35", "53"};
  std::vector<double> interval{expsamp::kDefaultA, expsamp::kDefaultB};
  std::vector<double> points = expsamp::kTablePoints;
  int grid = 400;
  std::string function = "h1";
  std::string phi_function;
  double lambda = 0.0;
  double quad_tol = 1e-10;
  std::string output;
  std::string format = "csv";
  std::string config_file;
};

void add_experiment_options(CLI::App* cmd, Flags& f) {
  cmd->add_option("--operator", f.op, "max_product or max_min");
  cmd->add_option("--phi", f.phi, "sampling kernel spec, e.g. bspline:2");
  cmd->add_option("--psi", f.psi, "averaging kernel spec, e.g. jackson:1.05:1");
  cmd->add_option("--n", f.n_list, "operator orders")->delimiter(',')->expected(0, -1);
  cmd->add_option("--interval", f.interval, "a b")->expected(2);
  cmd->add_option("--points", f.points, "evaluation points")->delimiter(',');
  cmd->add_option("--grid", f.grid, "sweep grid density");
  cmd->add_option("--function", f.function, "h1, h2, const:<c> or file:<csv>");
  cmd->add_option("--phi-function", f.phi_function, "power:p, exppower:a or powerlog:a:b");
  cmd->add_option("--lambda", f.lambda, "modular scaling");
  cmd->add_option("--quad-tol", f.quad_tol, "quadrature absolute tolerance");
  cmd->add_option("--output", f.output, "output path (default stdout)");
  cmd->add_option("--format", f.format, "csv or json");
  cmd->add_option("--config", f.config_file, "JSON config; overrides flags");
}

ExperimentConfig resolve(const Flags& f) {
  ExperimentConfig c;
  c.op = expsamp::parse_operator_kind(f.op);
  c.phi = f.phi;
  c.psi = f.psi;
  c.n_list.clear();
  for (const auto& s : f.n_list) {
    if (s.empty()) continue;
    try {
      std::size_t used = 0;
      c.n_list.push_back(std::stoi(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw UsageError("malformed order '" + s + "'");
    }
  }
  c.a = f.interval.at(0);
  c.b = f.interval.at(1);
  c.points = f.points;
  c.grid = f.grid;
  c.function = f.function;
  if (!f.phi_function.empty()) c.phi_function = f.phi_function;
  if (f.lambda != 0.0) c.lambda = f.lambda;
  c.quad_tol = f.quad_tol;
  c.output = f.output;
  c.format = expsamp::parse_output_format(f.format);
  if (!f.config_file.empty()) c = expsamp::load_config(f.config_file, c);
  if (c.n_list.empty()) throw UsageError("n list is empty");
  c.validate();
  return c;
}

std::string real(double x) { return expsamp::format_real(x); }

void emit(const ExperimentConfig& c, const std::string& csv, const json& doc) {
  const std::string text = c.format == expsamp::OutputFormat::csv ? csv : doc.dump(2) + "\n";
  if (c.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(c.output);
  if (!out) throw expsamp::Error("cannot write '" + c.output + "'");
  out << text;
}

json envelope(const ExperimentConfig& c, const char* command) {
  return json{{"command", command}, {"config", expsamp::to_json(c)}};
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

// ---------------------------------------------------------------------------

std::string support_text(const expsamp::MellinKernel& k) {
  const auto s = k.log_support();
  if (!s) return "(0, inf)";
  auto side = [](double u) {
    if (u == 1.0) return std::string("e");
    return "e^" + expsamp::detail::format_number(u);
  };
  return "[" + side(s->lo) + ", " + side(s->hi) + "]";
}

int cmd_kernel_info(const std::string& spec, const std::string& format) {
  const auto k = expsamp::parse_kernel_spec(spec);
  const auto m = expsamp::compute_metrics(k);
  if (format == "json") {
    json j{{"kernel", k.name()},
           {"support", support_text(k)},
           {"norm_constant", k.norm_constant()},
           {"unit_mass", m.unit_mass},
           {"theta", m.theta},
           {"discrete_moment", {m.discrete_moment[0], m.discrete_moment[1], m.discrete_moment[2]}},
           {"continuous_moment",
            {number_or_null(m.continuous_moment[0]), number_or_null(m.continuous_moment[1]),
             number_or_null(m.continuous_moment[2])}},
           {"l1_norm", m.l1_norm}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << "kernel: " << k.name() << "\n"
            << "support: " << support_text(k) << "\n"
            << "norm_constant: " << real(k.norm_constant()) << "\n"
            << "unit_mass: " << real(m.unit_mass) << "\n"
            << "theta: " << real(m.theta) << "\n";
  for (int r = 0; r < 3; ++r)
    std::cout << "discrete_moment_" << r << ": " << real(m.discrete_moment[static_cast<std::size_t>(r)]) << "\n";
  for (int r = 0; r < 3; ++r)
    std::cout << "continuous_moment_" << r << ": " << real(m.continuous_moment[static_cast<std::size_t>(r)]) << "\n";
  std::cout << "l1_norm: " << real(m.l1_norm) << "\n";
  return 0;
}

int cmd_op_eval(const ExperimentConfig& c) {
  const auto phi = expsamp::parse_kernel_spec(c.phi);
  const auto psi = expsamp::parse_kernel_spec(c.psi);
  const auto h = expsamp::resolve_function(c.function);
  std::ostringstream csv;
  csv << "n,point,value,target,abs_error,skipped,active_index\n";
  json rows = json::array();
  for (int n : c.n_list) {
    const auto bound = expsamp::SamplingOperator(expsamp::make_config(phi, psi, n, c.a, c.b, c.quadrature())).bind(h);
    for (double w : c.points) {
      const auto ev = bound.evaluate(c.op, w);
      const double target = h(w);
      const double err = ev.skipped ? std::nan("") : std::abs(ev.value - target);
      csv << n << ',' << real(w) << ',' << real(ev.value) << ',' << real(target) << ',' << real(err) << ','
          << (ev.skipped ? 1 : 0) << ',' << ev.active_index << '\n';
      rows.push_back({{"n", n},
                      {"point", w},
                      {"value", number_or_null(ev.value)},
                      {"target", target},
                      {"abs_error", number_or_null(err)},
                      {"skipped", ev.skipped},
                      {"skip_reason", ev.skip_reason},
                      {"active_index", ev.active_index},
                      {"outside_guarantee_range", ev.outside_guarantee_range}});
    }
  }
  auto doc = envelope(c, "op eval");
  doc["rows"] = rows;
  emit(c, csv.str(), doc);
  return 0;
}

int cmd_table(const ExperimentConfig& c, bool single_operator) {
  const auto phi = expsamp::parse_kernel_spec(c.phi);
  const auto psi = expsamp::parse_kernel_spec(c.psi);
  const auto h = expsamp::resolve_function(c.function);
  std::vector<expsamp::OperatorKind> kinds{c.op};
  if (!single_operator) kinds = {expsamp::OperatorKind::max_product, expsamp::OperatorKind::max_min};
  const auto tables =
      expsamp::build_error_tables(kinds, phi, psi, c.n_list, c.points, c.a, c.b, c.quadrature(), h);
  const auto rows = expsamp::table_rows(tables);
  std::ostringstream csv;
  expsamp::write_table_csv(csv, rows);
  json jrows = json::array();
  for (const auto& r : rows)
    jrows.push_back({{"n", r.n},
                     {"point", r.point},
                     {"abs_error", number_or_null(r.abs_error)},
                     {"skipped", r.skipped},
                     {"operator", r.op}});
  auto doc = envelope(c, "table");
  doc["operators"] = json::array();
  for (auto k : kinds) doc["operators"].push_back(expsamp::to_string(k));
  doc["rows"] = jrows;
  emit(c, csv.str(), doc);
  for (const auto& t : tables)
    for (const auto& [n, w] : t.skipped)
      std::cerr << "skipped: " << expsamp::to_string(t.kind) << " n=" << n << " w=" << real(w) << "\n";
  return 0;
}

int cmd_verify(const std::string& table, const std::string& reference, double rel_tol) {
  std::vector<expsamp::TableRow> computed, ref;
  try {
    computed = expsamp::read_table_csv_file(table);
    ref = expsamp::read_table_csv_file(reference);
  } catch (const expsamp::ConfigError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitUsage;
  }
  const auto rep = expsamp::verify_table(computed, ref, rel_tol);
  std::cout << "operator,n,point,computed,reference,rel_dev,status\n";
  for (const auto& cell : rep.cells) {
    const char* status = cell.flagged ? "flagged" : (cell.within ? "ok" : "deviates");
    std::cout << cell.op << ',' << cell.n << ',' << real(cell.point) << ',' << real(cell.computed) << ','
              << real(cell.reference) << ',' << real(cell.relative_deviation) << ',' << status << '\n';
  }
  for (const auto& [op, w, n] : rep.trend_violations)
    std::cout << "trend violation: " << op << " w=" << real(w) << " error increases at n=" << n << "\n";
  if (rep.missing) std::cout << "missing cells: " << rep.missing << "\n";
  std::cout << (rep.passed() ? "verify: PASS" : "verify: FAIL") << "\n";
  return rep.passed() ? 0 : kExitMismatch;
}

int cmd_sweep(const ExperimentConfig& c) {
  const auto phi = expsamp::parse_kernel_spec(c.phi);
  const auto psi = expsamp::parse_kernel_spec(c.psi);
  const auto h = expsamp::resolve_function(c.function);
  const auto r = expsamp::convergence_sweep(c.op, phi, psi, h, c.n_list, c.grid, c.a, c.b, c.quadrature());
  std::ostringstream csv;
  csv << "n,sup_error\n";
  json rows = json::array();
  for (std::size_t i = 0; i < r.n_values.size(); ++i) {
    csv << r.n_values[i] << ',' << real(r.sup_error[i]) << '\n';
    json errs = json::array();
    for (double e : r.point_errors[i]) errs.push_back(number_or_null(e));
    rows.push_back({{"n", r.n_values[i]}, {"sup_error", r.sup_error[i]}, {"skipped", r.skipped[i]}, {"errors", errs}});
  }
  auto doc = envelope(c, "sweep");
  doc["grid"] = r.grid;
  doc["rows"] = rows;
  emit(c, csv.str(), doc);
  return 0;
}

int cmd_modular(const ExperimentConfig& c) {
  if (!c.phi_function) throw UsageError("modular requires --phi-function");
  const auto zeta = expsamp::parse_phi_function(*c.phi_function);
  const double lambda = c.lambda.value_or(1.0);
  const auto phi = expsamp::parse_kernel_spec(c.phi);
  const auto psi = expsamp::parse_kernel_spec(c.psi);
  const auto h = expsamp::resolve_function(c.function);
  const auto templ = expsamp::make_config(phi, psi, c.n_list.front(), c.a, c.b, c.quadrature());
  const auto series = expsamp::modular_convergence_series(zeta, c.op, h, templ, c.n_list, lambda);
  std::ostringstream csv;
  csv << "n,modular_value,lambda\n";
  json rows = json::array();
  for (const auto& r : series) {
    csv << r.n << ',' << real(r.modular_value) << ',' << real(r.lambda) << '\n';
    rows.push_back(
        {{"n", r.n}, {"modular_value", r.modular_value}, {"lambda", r.lambda}, {"skipped_nodes", r.skipped_nodes}});
  }
  auto doc = envelope(c, "modular");
  doc["rows"] = rows;
  emit(c, csv.str(), doc);
  return 0;
}

int cmd_props(unsigned long long seed, std::size_t cases) {
  using expsamp::PropertyStatus;
  std::vector<expsamp::PropertyReport> reports = expsamp::maxmin_algebra_checks(seed, cases);
  for (const char* spec : {"power:2", "powerlog:1:1", "exppower:1"}) {
    for (auto r : expsamp::jensen_max_checks(expsamp::parse_phi_function(spec), seed, cases)) {
      r.name = std::string(spec) + ": " + r.name;
      reports.push_back(std::move(r));
    }
  }
  const auto cfg = expsamp::make_config(expsamp::MellinKernel::fejer(std::numbers::pi, 0.0),
                                        expsamp::MellinKernel::bspline(2), 5, 1.0, std::exp(2.0));
  reports.push_back(expsamp::denominator_lower_bound_check(cfg, expsamp::log_grid(1.05, std::exp(2.0) - 0.05, 100)));
  bool ok = true;
  for (const auto& r : reports) {
    const char* status = r.status == PropertyStatus::passed   ? "passed"
                         : r.status == PropertyStatus::failed ? "FAILED"
                                                              : "rejected";
    std::cout << status << "  " << r.name << "  cases=" << r.cases << " violations=" << r.violations;
    if (!r.counterexample.empty()) std::cout << "  " << r.counterexample;
    std::cout << "\n";
    ok = ok && r.status != PropertyStatus::failed;
  }
  return ok ? 0 : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max-product and max-min exponential sampling experiments"};
  app.require_subcommand(1);

  auto* kernel = app.add_subcommand("kernel", "kernel inspection");
  kernel->require_subcommand(1);
  auto* info = kernel->add_subcommand("info", "print kernel metrics");
  std::string kernel_spec, kernel_format = "text";
  info->add_option("spec", kernel_spec, "kernel spec")->required();
  info->add_option("--format", kernel_format, "text or json");

  auto* op = app.add_subcommand("op", "operator evaluation");
  op->require_subcommand(1);
  auto* eval = op->add_subcommand("eval", "evaluate an operator at points");
  Flags eval_flags;
  add_experiment_options(eval, eval_flags);

  auto* table = app.add_subcommand("table", "absolute-error table for both operators");
  Flags table_flags;
  add_experiment_options(table, table_flags);

  auto* verify = app.add_subcommand("verify", "compare a table against a reference table");
  std::string verify_table, verify_reference;
  double rel_tol = 0.25;
  verify->add_option("table", verify_table, "computed table CSV")->required();
  verify->add_option("reference", verify_reference, "reference table CSV")->required();
  verify->add_option("--rel-tol", rel_tol, "relative tolerance per cell");

  auto* sweep = app.add_subcommand("sweep", "sup-error over a log-spaced grid");
  Flags sweep_flags;
  add_experiment_options(sweep, sweep_flags);

  auto* modular = app.add_subcommand("modular", "modular of the approximation error");
  Flags modular_flags;
  add_experiment_options(modular, modular_flags);

  auto* props = app.add_subcommand("props", "randomised lemma checks");
  unsigned long long seed = 42;
  std::size_t cases = 10000;
  props->add_option("--seed", seed);
  props->add_option("--cases", cases);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (info->parsed()) return cmd_kernel_info(kernel_spec, kernel_format);
    if (eval->parsed()) return cmd_op_eval(resolve(eval_flags));
    if (table->parsed()) return cmd_table(resolve(table_flags), table->count("--operator") > 0);
    if (verify->parsed()) return cmd_verify(verify_table, verify_reference, rel_tol);
    if (sweep->parsed()) return cmd_sweep(resolve(sweep_flags));
    if (modular->parsed()) return cmd_modular(resolve(modular_flags));
    if (props->parsed()) return cmd_props(seed, cases);
  } catch (const expsamp::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
