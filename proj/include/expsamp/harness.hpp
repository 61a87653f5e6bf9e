#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "expsamp/error.hpp"
#include "expsamp/function_handle.hpp"
#include "expsamp/kernels.hpp"
#include "expsamp/operators.hpp"
#include "expsamp/quadrature.hpp"

namespace expsamp {

inline const std::vector<int> kTableOrders{17, 26, 35, 53};
inline const std::vector<double> kTablePoints{0.8, 1.5, 2.0, 2.5};
inline constexpr double kDefaultA = 0.25;
inline constexpr double kDefaultB = 3.0;

/// |D_n(h)(w) - h(w)| for each (n, w). Skipped cells hold NaN and are listed.
struct ErrorTable {
  OperatorKind kind = OperatorKind::max_product;
  std::string phi;
  std::string psi;
  std::string function;
  double a = kDefaultA;
  double b = kDefaultB;
  std::vector<int> n_values;
  std::vector<double> points;
  std::vector<std::vector<double>> entries;  // [n index][point index]
  std::vector<std::pair<int, double>> skipped;
};

struct SweepReport {
  OperatorKind kind = OperatorKind::max_product;
  std::string phi;
  std::string psi;
  std::string function;
  double a = kDefaultA;
  double b = kDefaultB;
  std::vector<int> n_values;
  std::vector<double> grid;
  std::vector<double> sup_error;                   // per n, over non-skipped grid points
  std::vector<std::vector<double>> point_errors;  // [n index][grid index], NaN when skipped
  std::vector<std::size_t> skipped;                // per n
};

inline OperatorConfig make_config(const MellinKernel& phi, const MellinKernel& psi, int n, double a, double b,
                                  const QuadratureSpec& quad = {}) {
  return OperatorConfig{phi, psi, n, a, b, quad};
}

/// Error tables for several operator kinds sharing one coefficient pass per n.
inline std::vector<ErrorTable> build_error_tables(const std::vector<OperatorKind>& kinds, const MellinKernel& phi,
                                                  const MellinKernel& psi, const std::vector<int>& n_values,
                                                  const std::vector<double>& points, double a, double b,
                                                  const QuadratureSpec& quad, const FunctionHandle& h) {
  if (n_values.empty()) throw ConfigError("error table: empty n list");
  for (double w : points)
    if (!(w > a && w < b)) throw ConfigError("error table: evaluation points must lie inside (a, b)");
  std::vector<ErrorTable> tables;
  for (auto kind : kinds) {
    ErrorTable t;
    t.kind = kind;
    t.phi = phi.name();
    t.psi = psi.name();
    t.function = h.name();
    t.a = a;
    t.b = b;
    t.n_values = n_values;
    t.points = points;
    tables.push_back(std::move(t));
  }
  for (int n : n_values) {
    const auto bound = SamplingOperator(make_config(phi, psi, n, a, b, quad)).bind(h);
    for (auto& t : tables) {
      std::vector<double> row;
      for (double w : points) {
        const auto ev = bound.evaluate(t.kind, w);
        if (ev.skipped) {
          row.push_back(std::nan(""));
          t.skipped.emplace_back(n, w);
        } else {
          row.push_back(std::abs(ev.value - h(w)));
        }
      }
      t.entries.push_back(std::move(row));
    }
  }
  return tables;
}

inline ErrorTable build_error_table(OperatorKind kind, const MellinKernel& phi, const MellinKernel& psi,
                                    const std::vector<int>& n_values, const std::vector<double>& points, double a,
                                    double b, const QuadratureSpec& quad, const FunctionHandle& h) {
  return build_error_tables({kind}, phi, psi, n_values, points, a, b, quad, h).front();
}

/// `points` log-spaced points on [max(a, 0.3), min(b, 2.9)].
inline std::vector<double> default_sweep_grid(double a, double b, int points = 400) {
  const double lo = std::max(a, 0.3), hi = std::min(b, 2.9);
  if (!(lo < hi)) throw ConfigError("sweep grid: interval does not meet [0.3, 2.9]");
  std::vector<double> g;
  for (int i = 0; i < points; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1)));
  return g;
}

inline SweepReport convergence_sweep(OperatorKind kind, const MellinKernel& phi, const MellinKernel& psi,
                                     const FunctionHandle& h, const std::vector<int>& n_values, int grid_density,
                                     double a, double b, const QuadratureSpec& quad = {}) {
  for (std::size_t i = 1; i < n_values.size(); ++i)
    if (n_values[i] <= n_values[i - 1]) throw ConfigError("sweep: n values must be increasing");
  SweepReport r;
  r.kind = kind;
  r.phi = phi.name();
  r.psi = psi.name();
  r.function = h.name();
  r.a = a;
  r.b = b;
  r.n_values = n_values;
  r.grid = default_sweep_grid(a, b, grid_density);
  for (int n : n_values) {
    const auto bound = SamplingOperator(make_config(phi, psi, n, a, b, quad)).bind(h);
    std::vector<double> errs;
    double sup = 0.0;
    std::size_t skipped = 0;
    for (double w : r.grid) {
      const auto ev = bound.evaluate(kind, w);
      if (ev.skipped) {
        ++skipped;
        errs.push_back(std::nan(""));
        continue;
      }
      const double e = std::abs(ev.value - h(w));
      errs.push_back(e);
      sup = std::max(sup, e);
    }
    r.sup_error.push_back(sup);
    r.point_errors.push_back(std::move(errs));
    r.skipped.push_back(skipped);
  }
  return r;
}

// ---------------------------------------------------------------------------
// CSV tables
// ---------------------------------------------------------------------------

inline constexpr const char* kTableHeader = "n,point,abs_error,skipped,operator";

struct TableRow {
  std::string op;
  int n = 0;
  double point = 0.0;
  double abs_error = 0.0;
  bool skipped = false;
};

class SchemaError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

inline std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

inline std::vector<TableRow> table_rows(const std::vector<ErrorTable>& tables) {
  std::vector<TableRow> rows;
  for (const auto& t : tables)
    for (std::size_t i = 0; i < t.n_values.size(); ++i)
      for (std::size_t j = 0; j < t.points.size(); ++j) {
        const double e = t.entries[i][j];
        rows.push_back({to_string(t.kind), t.n_values[i], t.points[j], e, std::isnan(e)});
      }
  return rows;
}

inline void write_table_csv(std::ostream& out, const std::vector<TableRow>& rows) {
  out << kTableHeader << '\n';
  for (const auto& r : rows)
    out << r.n << ',' << format_real(r.point) << ',' << format_real(r.abs_error) << ',' << (r.skipped ? 1 : 0) << ','
        << r.op << '\n';
}

inline std::vector<TableRow> read_table_csv(std::istream& in, const std::string& source = "table") {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(source + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTableHeader) throw SchemaError(source + ": expected header '" + std::string(kTableHeader) + "'");
  std::vector<TableRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    const auto where = source + " line " + std::to_string(line_no);
    if (fields.size() != 5) throw SchemaError(where + ": expected 5 fields");
    TableRow r;
    try {
      std::size_t used = 0;
      r.n = std::stoi(fields[0], &used);
      if (used != fields[0].size()) throw std::invalid_argument("n");
      r.point = std::stod(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument("point");
      r.abs_error = fields[2] == "nan" ? std::nan("") : std::stod(fields[2], &used);
      if (fields[2] != "nan" && used != fields[2].size()) throw std::invalid_argument("abs_error");
    } catch (const std::exception&) {
      throw SchemaError(where + ": malformed number");
    }
    if (fields[3] != "0" && fields[3] != "1") throw SchemaError(where + ": skipped must be 0 or 1");
    r.skipped = fields[3] == "1";
    r.op = fields[4];
    if (r.op != "max_product" && r.op != "max_min") throw SchemaError(where + ": unknown operator '" + r.op + "'");
    rows.push_back(r);
  }
  return rows;
}

inline std::vector<TableRow> read_table_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_table_csv(in, path);
}

// ---------------------------------------------------------------------------
// Trend and value comparison
// ---------------------------------------------------------------------------

/// (operator, point, n_to) where the error at n_to exceeds the error at the
/// preceding n in the same (operator, point) series.
using TrendPosition = std::tuple<std::string, double, int>;

inline std::map<std::pair<std::string, double>, std::vector<std::pair<int, double>>> series_by_point(
    const std::vector<TableRow>& rows) {
  std::map<std::pair<std::string, double>, std::vector<std::pair<int, double>>> out;
  for (const auto& r : rows) out[{r.op, r.point}].emplace_back(r.n, r.abs_error);
  for (auto& [key, s] : out) std::sort(s.begin(), s.end());
  return out;
}

/// Positions where a series increases with n. Skipped (NaN) cells break the chain.
inline std::set<TrendPosition> increasing_positions(const std::vector<TableRow>& rows) {
  std::set<TrendPosition> out;
  for (const auto& [key, s] : series_by_point(rows))
    for (std::size_t i = 1; i < s.size(); ++i)
      if (s[i].second > s[i - 1].second) out.emplace(key.first, key.second, s[i].first);
  return out;
}

struct CellComparison {
  std::string op;
  int n = 0;
  double point = 0.0;
  double computed = 0.0;
  double reference = 0.0;
  double relative_deviation = 0.0;
  bool flagged = false;
  bool within = false;
};

struct VerifyReport {
  std::vector<CellComparison> cells;
  std::set<TrendPosition> flagged;          // non-monotone in the reference
  std::set<TrendPosition> trend_violations;  // non-monotone in the computed table, not flagged
  std::size_t missing = 0;                   // reference cells without a computed counterpart
  bool values_ok = true;
  bool trend_ok = true;
  bool passed() const noexcept { return values_ok && trend_ok && missing == 0; }
};

inline bool points_equal(double x, double y) { return std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(y)); }

/// Compares a computed table against a reference table. Cells at flagged
/// positions (where the reference itself increases with n) are reported
/// but excluded from both the value and the trend verdicts.
inline VerifyReport verify_table(const std::vector<TableRow>& computed, const std::vector<TableRow>& reference,
                                 double rel_tol) {
  VerifyReport rep;
  rep.flagged = increasing_positions(reference);
  for (const auto& pos : increasing_positions(computed))
    if (!rep.flagged.contains(pos)) rep.trend_violations.insert(pos);
  rep.trend_ok = rep.trend_violations.empty();
  // series touching a skipped computed cell cannot be judged
  for (const auto& r : computed)
    if (r.skipped) rep.trend_ok = false;

  for (const auto& ref : reference) {
    const auto it = std::find_if(computed.begin(), computed.end(), [&](const TableRow& c) {
      return c.op == ref.op && c.n == ref.n && points_equal(c.point, ref.point);
    });
    if (it == computed.end()) {
      ++rep.missing;
      continue;
    }
    CellComparison cell{ref.op, ref.n, ref.point, it->abs_error, ref.abs_error, 0.0, false, false};
    cell.flagged = rep.flagged.contains(TrendPosition{ref.op, ref.point, ref.n});
    const double diff = std::abs(cell.computed - cell.reference);
    cell.relative_deviation = cell.reference != 0.0 ? diff / std::abs(cell.reference) : (diff == 0.0 ? 0.0 : INFINITY);
    cell.within = !it->skipped && cell.relative_deviation <= rel_tol;
    if (!cell.flagged && !cell.within) rep.values_ok = false;
    rep.cells.push_back(cell);
  }
  return rep;
}

}  // namespace expsamp
