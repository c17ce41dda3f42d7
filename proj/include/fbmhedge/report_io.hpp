#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "fbmhedge/analysis.hpp"
#include "fbmhedge/csv.hpp"
#include "fbmhedge/fbm.hpp"
#include "fbmhedge/hedging.hpp"
#include "fbmhedge/local_time.hpp"

// CSV renderings of the report types. The CLI and the test suites share
// these so reproducibility checks cover the exact bytes users get.

namespace fbmhedge {

inline std::string experiment_report_csv(const ExperimentReport& report) {
  std::vector<std::string> header{"n", "mean_V1", "mean_D", "var_D"};
  for (double eps : report.epsilons) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "exceed_%.2f", eps);
    header.push_back(buf);
  }
  header.push_back("mean_J_hat");
  header.push_back("mc_stderr");

  CsvBuilder csv(header);
  for (const auto& row : report.rows) {
    std::vector<std::string> cells{std::to_string(row.intervals), format_double(row.mean_v1),
                                   format_double(row.mean_d), format_double(row.var_d)};
    for (double e : row.exceedance) cells.push_back(format_double(e));
    cells.push_back(format_double(row.mean_j_hat));
    cells.push_back(format_double(row.mc_stderr));
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    csv.add_row(line);
  }
  return csv.str();
}

inline std::string price_path_csv(const PricePath& path) {
  CsvBuilder csv({"t", "bh", "price"});
  for (std::size_t i = 0; i < path.prices.size(); ++i)
    csv.add_row(path.underlying.grid.time_at(i), path.underlying.values[i], path.prices[i]);
  return csv.str();
}

struct LocalTimeCsvRow {
  double level;
  double delta;
  double hurst;
  long count;
  double estimate;
  double oracle;
};

inline std::string local_time_csv(const std::vector<LocalTimeCsvRow>& rows) {
  CsvBuilder csv({"level", "delta", "hurst", "count", "estimate", "oracle"});
  for (const auto& r : rows)
    csv.add_row(r.level, r.delta, r.hurst, r.count, r.estimate, r.oracle);
  return csv.str();
}

inline std::string surface_csv(const ErrorSurface& surface) {
  CsvBuilder csv({"K", "H", "EJ"});
  for (std::size_t si = 0; si < surface.strikes.size(); ++si)
    for (std::size_t hi = 0; hi < surface.hursts.size(); ++hi)
      csv.add_row(surface.strikes[si], surface.hursts[hi], surface.at(si, hi));
  return csv.str();
}

inline std::string continuity_csv(const ContinuityStudy& study) {
  CsvBuilder csv({"H", "EJ", "gap_to_limit"});
  for (const auto& row : study.rows) csv.add_row(row.hurst, row.value, row.gap_to_limit);
  csv.add_row(0.5, study.limit_value, 0.0);
  return csv.str();
}

inline std::string mc_vs_quadrature_csv(const McQuadReport& r) {
  CsvBuilder csv({"K", "H", "mc_mean", "mc_stderr", "quad", "z"});
  csv.add_row(r.strike, r.hurst, r.mc_mean, r.mc_stderr, r.quadrature_value, r.z_score);
  return csv.str();
}

inline std::string frictionless_csv(const std::vector<FrictionlessRow>& rows) {
  CsvBuilder csv({"n", "i1"});
  for (const auto& r : rows) csv.add_row(r.intervals, r.i1);
  return csv.str();
}

inline std::string hedge_run_csv(const HedgeRun& run, const ErrorDecomposition* decomposition) {
  CsvBuilder csv({"n", "f_s0", "trading_gain", "turnover_cost_raw", "cost_rate", "terminal_value",
                  "i1", "i2", "realized_error"});
  if (decomposition)
    csv.add_row(run.intervals, run.payoff_at_start, run.trading_gain, run.turnover_cost_raw,
                run.cost_rate, run.terminal_value, decomposition->i1, decomposition->i2,
                decomposition->realized_error);
  else
    csv.add_row(run.intervals, run.payoff_at_start, run.trading_gain, run.turnover_cost_raw,
                run.cost_rate, run.terminal_value, "", "", "");
  return csv.str();
}

}  // namespace fbmhedge
