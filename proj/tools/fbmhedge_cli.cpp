// fbmhedge: experiment suites for discrete hedging under geometric
// fractional Brownian motion with proportional transaction costs.
//
// Every subcommand writes a CSV artifact and prints a summary with one
// [PASS]/[FAIL] line per assertion; the exit status is 0 iff all pass.
// [FINDING] lines flag observations that are reported but not gating.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "fbmhedge/analysis.hpp"
#include "fbmhedge/hedging.hpp"
#include "fbmhedge/payoff_io.hpp"
#include "fbmhedge/report_io.hpp"
#include "fbmhedge/stats.hpp"

using namespace fbmhedge;

namespace {

struct Summary {
  bool all_pass = true;

  void check(bool ok, const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", buf);
    all_pass = all_pass && ok;
  }

  void finding(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    std::printf("[FINDING] %s\n", buf);
  }

  void info(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    std::printf("%s\n", buf);
  }
};

struct OutputOpts {
  std::string out;
  std::string outdir = ".";
};

void add_output_options(CLI::App* cmd, OutputOpts& opts, const std::string& default_name) {
  cmd->add_option("--out", opts.out, "output CSV path (default <outdir>/" + default_name + ")");
  cmd->add_option("--outdir", opts.outdir, "default output directory")
      ->envname("FBMHEDGE_OUTDIR");
}

std::string resolve_output(const OutputOpts& opts, const std::string& default_name) {
  if (!opts.out.empty()) return opts.out;
  return (std::filesystem::path(opts.outdir) / default_name).string();
}

void write_artifact(Summary& summary, const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
  summary.info("wrote %s (%zu bytes)", path.c_str(), text.size());
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Expands `--config FILE` (a flat key=value file whose keys mirror the
// flags) into command-line tokens placed before the explicit flags.
// Explicit flags win; unknown keys surface as unknown-option errors.
std::vector<std::string> inject_config_tokens(std::vector<std::string> args) {
  std::size_t sub = 0;
  while (sub < args.size() && !args[sub].empty() && args[sub][0] == '-') ++sub;
  if (sub >= args.size()) return args;

  std::string config_file;
  std::vector<std::string> rest;
  for (std::size_t i = sub + 1; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::runtime_error("--config needs a file path");
      config_file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_file = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_file.empty()) return args;

  std::ifstream in(config_file);
  if (!in) throw std::runtime_error("cannot open config file: " + config_file);

  std::vector<std::string> explicit_keys;
  for (const auto& token : rest)
    if (token.rfind("--", 0) == 0) explicit_keys.push_back(token.substr(0, token.find('=')));

  std::vector<std::string> out(args.begin(), args.begin() + sub + 1);
  std::string line;
  while (std::getline(in, line)) {
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config file: expected key=value, got '" + text + "'");
    std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.rfind("--", 0) != 0) key = "--" + key;
    if (std::find(explicit_keys.begin(), explicit_keys.end(), key) != explicit_keys.end())
      continue;  // command line overrides the file
    out.push_back(key + "=" + value);
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

// ---- fbm-check ------------------------------------------------------------

int cmd_fbm_check(double hv, std::size_t paths, std::size_t steps, std::uint64_t seed,
                  unsigned workers, const OutputOpts& output, const std::string& export_path) {
  Summary summary;
  const HurstParameter h(hv);
  const UniformGrid grid(1.0, steps);
  if (steps < 4) throw CLI::ValidationError("--steps", "need at least 4 grid steps");

  const FbmCirculantSampler circulant(grid, h);
  const FbmCholeskySampler cholesky(grid, h);
  summary.info("fbm-check: H=%g steps=%zu paths=%zu seed=%llu", hv, steps, paths,
               static_cast<unsigned long long>(seed));
  if (circulant.used_fallback())
    summary.info("note: circulant embedding fell back to Cholesky sampling");

  const std::size_t s_node = steps / 4;
  const std::size_t t_node = 3 * steps / 4;
  std::vector<double> b1_sq(paths), incr_sq(paths), terminal(paths);
  parallel_for_blocks(paths, workers == 0 ? default_worker_count() : workers,
                      [&](std::size_t lo, std::size_t hi) {
                        for (std::size_t p = lo; p < hi; ++p) {
                          const FbmPath path = circulant.sample({seed, p});
                          terminal[p] = path.values[steps];
                          b1_sq[p] = terminal[p] * terminal[p];
                          const double d = path.values[t_node] - path.values[s_node];
                          incr_sq[p] = d * d;
                        }
                      });

  CsvBuilder csv({"check", "expected", "observed", "band", "pass"});
  const double n = static_cast<double>(paths);

  const double var_hat = mean(b1_sq);
  const double var_band = 4.0 * std::sqrt(2.0 / n);
  const bool var_ok = std::abs(var_hat - 1.0) < var_band;
  summary.check(var_ok, "Var(B_1) = %.5f within +-%.5f of 1", var_hat, var_band);
  csv.add_row("var_b1", 1.0, var_hat, var_band, var_ok ? 1 : 0);

  const double dt = grid.time_at(t_node) - grid.time_at(s_node);
  const double incr_expect = std::pow(dt, 2.0 * hv);
  const double incr_band = 4.0 * std::sqrt(2.0 / n) * incr_expect;
  const double incr_hat = mean(incr_sq);
  const bool incr_ok = std::abs(incr_hat - incr_expect) < incr_band;
  summary.check(incr_ok, "E|B_t - B_s|^2 = %.5f vs |t-s|^{2H} = %.5f (band %.5f)", incr_hat,
                incr_expect, incr_band);
  csv.add_row("increment_identity", incr_expect, incr_hat, incr_band, incr_ok ? 1 : 0);

  const std::size_t ks_paths = std::min<std::size_t>(paths, 10000);
  std::vector<double> chol_terminal(ks_paths);
  for (std::size_t p = 0; p < ks_paths; ++p)
    chol_terminal[p] = cholesky.sample({seed + 1, p}).values[steps];
  const auto ks = ks_test_two_sample(
      std::vector<double>(terminal.begin(), terminal.begin() + ks_paths), chol_terminal);
  const bool ks_ok = ks.p_value > 0.01;
  summary.check(ks_ok, "Cholesky vs circulant two-sample KS: D = %.4f, p = %.4f > 0.01",
                ks.statistic, ks.p_value);
  csv.add_row("sampler_agreement_ks_p", 0.01, ks.p_value, 0.0, ks_ok ? 1 : 0);

  const bool det_ok = circulant.sample({seed, 0}).values == circulant.sample({seed, 0}).values &&
                      cholesky.sample({seed, 0}).values == cholesky.sample({seed, 0}).values;
  summary.check(det_ok, "samplers are deterministic in the seed key");
  csv.add_row("determinism", 1.0, det_ok ? 1.0 : 0.0, 0.0, det_ok ? 1 : 0);

  write_artifact(summary, resolve_output(output, "fbm_check.csv"), csv.str());
  if (!export_path.empty()) {
    const PricePath debug = to_price_path(circulant.sample({seed, 0}), 1.0);
    std::ofstream out(export_path, std::ios::binary);
    out << price_path_csv(debug);
    summary.info("wrote %s", export_path.c_str());
  }
  return summary.all_pass ? 0 : 1;
}

// ---- localtime --------------------------------------------------------------

int cmd_localtime(double hv, double level, std::size_t paths, std::vector<std::size_t> meshes,
                  std::uint64_t seed, unsigned workers, const OutputOpts& output) {
  Summary summary;
  const HurstParameter h(hv);
  if (meshes.empty()) throw CLI::ValidationError("--meshes", "need at least one mesh");
  std::sort(meshes.begin(), meshes.end());
  const std::size_t finest = meshes.back();
  for (std::size_t m : meshes)
    if (finest % m != 0)
      throw CLI::ValidationError("--meshes", "every mesh must divide the finest one");

  const FbmCirculantSampler sampler(UniformGrid(1.0, finest), h);
  summary.info("localtime: H=%g level=%g paths=%zu finest mesh=1/%zu seed=%llu", hv, level, paths,
               finest, static_cast<unsigned long long>(seed));
  const std::size_t k_count = meshes.size();
  std::vector<std::vector<double>> est(k_count, std::vector<double>(paths));
  std::vector<std::vector<double>> oracle(k_count, std::vector<double>(paths));
  std::vector<std::vector<long>> counts(k_count, std::vector<long>(paths));

  parallel_for_blocks(paths, workers == 0 ? default_worker_count() : workers,
                      [&](std::size_t lo, std::size_t hi) {
                        for (std::size_t p = lo; p < hi; ++p) {
                          const FbmPath fine = sampler.sample({seed, p});
                          for (std::size_t k = 0; k < k_count; ++k) {
                            const FbmPath path =
                                meshes[k] == finest ? fine : refine_restrict(fine, meshes[k]);
                            const LocalTimeEstimate e = estimate_local_time(path, level);
                            est[k][p] = e.value;
                            counts[k][p] = e.crossings;
                            oracle[k][p] = occupation_histogram_oracle(
                                path, level, default_oracle_bandwidth(path.grid.mesh(), hv));
                          }
                        }
                      });

  std::vector<LocalTimeCsvRow> rows;
  rows.reserve(paths * k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const double delta = 1.0 / static_cast<double>(meshes[k]);
    for (std::size_t p = 0; p < paths; ++p)
      rows.push_back({level, delta, hv, counts[k][p], est[k][p], oracle[k][p]});
  }

  if (k_count >= 2) {
    std::vector<double> l2(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
      std::vector<double> sq(paths);
      for (std::size_t p = 0; p < paths; ++p)
        sq[p] = (est[k][p] - oracle[k][p]) * (est[k][p] - oracle[k][p]);
      l2[k] = mean(sq);
    }
    bool decreasing = true;
    for (std::size_t k = 1; k < k_count; ++k) decreasing = decreasing && l2[k] < l2[k - 1];
    std::string shown;
    for (double v : l2) shown += format_double(v) + " ";
    summary.check(decreasing, "L2 distance to occupation oracle decreases with the mesh: %s",
                  shown.c_str());
  }

  const double expected = expected_local_time(level, h, 1.0);
  const double got = mean(est[k_count - 1]);
  const double se = standard_error(est[k_count - 1]);
  const bool unbiased = std::abs(got - expected) < 3.0 * se;
  summary.check(unbiased,
                "finest-mesh MC mean %.5f within 3 SE (%.5f) of quadrature E l = %.5f", got,
                3.0 * se, expected);

  {
    const FbmPath path = sampler.sample({seed, 0});
    const std::size_t half = finest / 2;
    const long whole = count_crossings(path, level, full_range(path)).count;
    const long split = count_crossings(path, level, {0, half}).count +
                       count_crossings(path, level, {half, finest}).count;
    summary.check(whole == split, "crossing counts add over a split of [0,1] (%ld = %ld)", whole,
                  split);
  }

  write_artifact(summary, resolve_output(output, "localtime.csv"), local_time_csv(rows));
  return summary.all_pass ? 0 : 1;
}

// ---- hedge -----------------------------------------------------------------

int cmd_hedge(const std::string& payoff_spec, double hv, double s0, double k0, double alpha,
              std::size_t n, std::size_t sim_steps, std::uint64_t seed, const OutputOpts& output) {
  Summary summary;
  const HurstParameter h(hv);
  const ConvexPayoff payoff = parse_payoff_spec(payoff_spec);
  if (sim_steps == 0) sim_steps = 4 * n;
  if (sim_steps % n != 0)
    throw CLI::ValidationError("--n", "trading grid must divide sim-steps");

  const CostSchedule schedule =
      alpha <= 0.0 ? CostSchedule::theorem_regime(k0, h) : CostSchedule(k0, alpha);
  const bool theorem_regime = std::abs(schedule.alpha() - (1.0 - hv)) <= 1e-12;

  const FbmCirculantSampler sampler(UniformGrid(1.0, sim_steps), h);
  const PricePath fine = to_price_path(sampler.sample({seed, 0}), s0);
  const PricePath prices = restrict_price_path(fine, n);
  const HedgeRun run = run_hedge(payoff, prices, schedule);
  summary.info("hedge: payoff=%s H=%g s0=%g k0=%g alpha=%g sim_steps=%zu seed=%llu",
               payoff_spec.c_str(), hv, s0, k0, schedule.alpha(), sim_steps,
               static_cast<unsigned long long>(seed));

  summary.info("n = %zu, k_n = %s, f(S_0) = %s", run.intervals, format_double(run.cost_rate).c_str(),
               format_double(run.payoff_at_start).c_str());
  summary.info("trading_gain = %s, turnover = %s, V_1 = %s",
               format_double(run.trading_gain).c_str(),
               format_double(run.turnover_cost_raw).c_str(),
               format_double(run.terminal_value).c_str());

  summary.check(run.terminal_value == run.payoff_at_start + run.trading_gain -
                                          run.cost_rate * run.turnover_cost_raw,
                "terminal value identity V1 = f(S0) + gain - k_n * turnover");
  summary.check(run.turnover_cost_raw >= 0.0, "turnover is nonnegative");

  const ErrorDecomposition* dec_ptr = nullptr;
  ErrorDecomposition dec{};
  if (theorem_regime) {
    dec = error_decomposition(run, payoff);
    dec_ptr = &dec;
    const double resid = std::abs(dec.realized_error - (dec.i1 - schedule.k0() * dec.i2));
    summary.check(resid <= 1e-12 * (1.0 + std::abs(dec.realized_error)),
                  "decomposition identity residual %.2e <= 1e-12 relative", resid);
    summary.info("i1 = %s, i2 = %s, realized error = %s", format_double(dec.i1).c_str(),
                 format_double(dec.i2).c_str(), format_double(dec.realized_error).c_str());
  } else {
    summary.info("alpha = %g != 1 - H: no I1/I2 decomposition in this regime", schedule.alpha());
  }

  write_artifact(summary, resolve_output(output, "hedge.csv"), hedge_run_csv(run, dec_ptr));
  return summary.all_pass ? 0 : 1;
}

// ---- theorem / corollary ----------------------------------------------------

void print_experiment(Summary& summary, const ExperimentReport& report) {
  for (const auto& row : report.rows) {
    std::string exceed;
    for (std::size_t e = 0; e < report.epsilons.size(); ++e) {
      char buf[48];
      std::snprintf(buf, sizeof buf, " P(|D|>%.2f)=%.3f", report.epsilons[e], row.exceedance[e]);
      exceed += buf;
    }
    summary.info("n=%5zu mean_V1=%+.4f mean_D=%+.4f sd_D=%.4f%s", row.intervals, row.mean_v1,
                 row.mean_d, std::sqrt(row.var_d), exceed.c_str());
  }
}

int cmd_theorem(const std::string& payoff_spec, double hv, double s0, double k0,
                std::vector<std::size_t> n_list, std::size_t sim_steps, std::size_t paths,
                std::uint64_t seed, std::vector<double> epsilons, unsigned workers,
                const OutputOpts& output, double alpha, bool corollary) {
  Summary summary;
  const HurstParameter h(hv);
  const ConvexPayoff payoff = parse_payoff_spec(payoff_spec);
  if (n_list.empty()) throw CLI::ValidationError("--n", "need at least one n");
  std::sort(n_list.begin(), n_list.end());
  if (sim_steps == 0) sim_steps = 4 * n_list.back();

  ExperimentConfig cfg;
  cfg.s0 = s0;
  cfg.k0 = k0;
  cfg.trading_grids = n_list;
  cfg.sim_steps = sim_steps;
  cfg.paths = paths;
  cfg.seed = seed;
  if (!epsilons.empty()) cfg.epsilons = epsilons;
  cfg.workers = workers;

  const ExperimentReport report =
      corollary ? corollary_fast_costs_experiment(payoff, h, alpha, cfg)
                : theorem_convergence_experiment(payoff, h, cfg);

  summary.info("%s experiment: H=%g k0=%g alpha=%g sim_steps=%zu paths=%zu seed=%llu",
               corollary ? "corollary" : "theorem", hv, k0, report.alpha, sim_steps, paths,
               static_cast<unsigned long long>(seed));
  print_experiment(summary, report);

  for (std::size_t e = 0; e < report.epsilons.size(); ++e) {
    const double first = report.rows.front().exceedance[e];
    const double last = report.rows.back().exceedance[e];
    summary.check(last <= first, "exceedance trend at eps=%.2f: %.3f -> %.3f", report.epsilons[e],
                  first, last);
  }
  if (!corollary) {
    summary.check(report.rows.front().mean_j_hat >= 0.0, "mean J_hat = %.5f is nonnegative",
                  report.rows.front().mean_j_hat);
  }

  write_artifact(summary,
                 resolve_output(output, corollary ? "corollary.csv" : "theorem.csv"),
                 experiment_report_csv(report));
  return summary.all_pass ? 0 : 1;
}

// ---- surface / continuity / mc-vs-quad --------------------------------------

std::vector<double> build_grid(double lo, double hi, double step, const char* what) {
  if (!(step > 0.0) || !(lo <= hi)) throw CLI::ValidationError(what, "bad grid bounds");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double v = lo + step * i;
    if (v > hi + 1e-12) break;
    grid.push_back(v);
  }
  return grid;
}

int cmd_surface(double k_min, double k_max, double k_step, double h_min, double h_max,
                double h_step, double k0, double tol, unsigned workers, const OutputOpts& output) {
  Summary summary;
  const auto strikes = build_grid(k_min, k_max, k_step, "--k-min");
  const auto hursts = build_grid(h_min, h_max, h_step, "--h-min");
  const ErrorSurface surface = error_surface(strikes, hursts, k0, tol, workers);
  summary.info("surface: K in [%g, %g] step %g, H in [%g, %g] step %g, k0=%g, tol=%g", k_min,
               k_max, k_step, h_min, h_max, h_step, k0, tol);

  bool positive = true;
  for (double v : surface.values) positive = positive && v > 0.0 && std::isfinite(v);
  summary.check(positive, "all %zu surface cells positive and finite", surface.values.size());

  std::size_t nearest_one = 0;
  for (std::size_t i = 1; i < strikes.size(); ++i)
    if (std::abs(strikes[i] - 1.0) < std::abs(strikes[nearest_one] - 1.0)) nearest_one = i;

  if (std::abs(strikes[nearest_one] - 1.0) < 1e-9) {
    bool pins = true;
    for (std::size_t hi = 0; hi < hursts.size(); ++hi) {
      // closed form at ln K = 0: sqrt(2/pi) k0 / ((1-H) sqrt(2 pi))
      const double pin = std::sqrt(2.0 / std::numbers::pi) * k0 /
                         ((1.0 - hursts[hi]) * std::sqrt(2.0 * std::numbers::pi));
      pins = pins && std::abs(surface.at(nearest_one, hi) - pin) < 1e-9 * pin;
    }
    summary.check(pins, "K = 1 column matches the closed form to 1e-9 relative");
  }

  bool max_at_one = true;
  for (std::size_t hi = 0; hi < hursts.size(); ++hi)
    max_at_one = max_at_one && surface.argmax_strike(hi) == nearest_one;
  if (max_at_one)
    summary.check(true, "grid max in K sits at the grid point nearest 1 (K = %.4f) for every H",
                  strikes[nearest_one]);
  else
    summary.finding("grid max in K moved away from the point nearest 1 for some H");

  write_artifact(summary, resolve_output(output, "surface.csv"), surface_csv(surface));
  return summary.all_pass ? 0 : 1;
}

int cmd_continuity(double strike, std::vector<double> h_list, double k0, double tol,
                   const OutputOpts& output) {
  Summary summary;
  if (h_list.empty()) h_list = {0.75, 0.65, 0.6, 0.55, 0.52, 0.51};
  const ContinuityStudy study = h_continuity_study(strike, h_list, k0, tol);
  summary.info("continuity: K=%g k0=%g", strike, k0);
  for (const auto& row : study.rows)
    summary.info("H=%.4f  E(J)=%.8f  |gap to H=1/2| = %.8f", row.hurst, row.value,
                 row.gap_to_limit);
  summary.info("limit (H = 1/2): %.8f", study.limit_value);
  summary.check(study.gaps_decreasing, "gaps to the Brownian limit decrease along the H sequence");
  write_artifact(summary, resolve_output(output, "continuity.csv"), continuity_csv(study));
  return summary.all_pass ? 0 : 1;
}

int cmd_mc_vs_quad(double strike, double hv, std::size_t sim_steps, std::size_t paths,
                   std::uint64_t seed, double k0, unsigned workers, const OutputOpts& output) {
  Summary summary;
  const McQuadReport r =
      mc_vs_quadrature(strike, HurstParameter(hv), sim_steps, paths, seed, k0, workers);
  summary.info("mc-vs-quad: K=%g H=%g sim_steps=%zu paths=%zu seed=%llu k0=%g", strike, hv,
               sim_steps, paths, static_cast<unsigned long long>(seed), k0);
  summary.info("mc = %.6f +- %.6f, quadrature = %.6f", r.mc_mean, r.mc_stderr,
               r.quadrature_value);
  summary.check(std::abs(r.z_score) < 4.0, "z score %.2f within 4 MC standard errors", r.z_score);
  write_artifact(summary, resolve_output(output, "mc_vs_quad.csv"), mc_vs_quadrature_csv(r));
  return summary.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete hedging of convex payoffs under geometric fractional Brownian motion"};
  app.require_subcommand(1);
  // --h is the Hurst parameter everywhere, so help is --help only
  app.set_help_flag("--help", "print help");

  // fbm-check
  auto* fbm = app.add_subcommand("fbm-check", "sampler law checks (variance, increments, KS)");
  double fbm_h = 0.75;
  std::size_t fbm_paths = 100000, fbm_steps = 8;
  std::uint64_t fbm_seed = 1;
  unsigned fbm_workers = 0;
  OutputOpts fbm_out;
  std::string fbm_export;
  fbm->add_option("--h", fbm_h, "Hurst parameter");
  fbm->add_option("--paths", fbm_paths, "Monte Carlo paths");
  fbm->add_option("--steps", fbm_steps, "grid steps");
  fbm->add_option("--seed", fbm_seed, "experiment seed");
  fbm->add_option("--workers", fbm_workers, "worker threads (0 = auto)");
  fbm->add_option("--export-path", fbm_export, "also dump path 0 as t,bh,price CSV");
  add_output_options(fbm, fbm_out, "fbm_check.csv");

  // localtime
  auto* lt = app.add_subcommand("localtime", "level-crossing local time estimator checks");
  double lt_h = 0.5, lt_level = 0.0;
  std::size_t lt_paths = 2000;
  std::vector<std::size_t> lt_meshes{256, 1024, 4096};
  std::uint64_t lt_seed = 1;
  unsigned lt_workers = 0;
  OutputOpts lt_out;
  lt->add_option("--h", lt_h, "Hurst parameter");
  lt->add_option("--level", lt_level, "level a");
  lt->add_option("--paths", lt_paths, "Monte Carlo paths");
  lt->add_option("--meshes", lt_meshes, "step counts, coarse to fine")->delimiter(',');
  lt->add_option("--seed", lt_seed, "experiment seed");
  lt->add_option("--workers", lt_workers, "worker threads (0 = auto)");
  add_output_options(lt, lt_out, "localtime.csv");

  // hedge
  auto* hedge = app.add_subcommand("hedge", "single discrete hedge on one simulated path");
  std::string hedge_payoff = "call:K=1";
  double hedge_h = 0.75, hedge_s0 = 1.0, hedge_k0 = 0.1, hedge_alpha = 0.0;
  std::size_t hedge_n = 256, hedge_sim = 0;
  std::uint64_t hedge_seed = 1;
  OutputOpts hedge_out;
  hedge->add_option("--payoff", hedge_payoff, "call:K=, straddle:K=, or file:<json>");
  hedge->add_option("--h", hedge_h, "Hurst parameter");
  hedge->add_option("--s0", hedge_s0, "initial price");
  hedge->add_option("--k0", hedge_k0, "cost coefficient k0");
  hedge->add_option("--alpha", hedge_alpha, "cost exponent (0 = theorem regime 1-H)");
  hedge->add_option("--n", hedge_n, "trading intervals");
  hedge->add_option("--sim-steps", hedge_sim, "simulation steps (0 = 4n)");
  hedge->add_option("--seed", hedge_seed, "experiment seed");
  add_output_options(hedge, hedge_out, "hedge.csv");

  // theorem / corollary
  auto* thm = app.add_subcommand("theorem", "V1 -> f(S1) - J convergence experiment (alpha = 1-H)");
  auto* cor = app.add_subcommand("corollary", "V1 -> f(S1) experiment for alpha > 1-H");
  struct ExpOpts {
    std::string payoff = "call:K=1";
    double h = 0.75, s0 = 1.0, k0 = 1.0, alpha = 1.0;
    std::vector<std::size_t> n{64, 128, 256, 512, 1024, 2048};
    std::size_t sim_steps = 0, paths = 500;
    std::uint64_t seed = 42;
    std::vector<double> eps{0.1, 0.05, 0.02};
    unsigned workers = 0;
    OutputOpts out;
  };
  ExpOpts thm_opts, cor_opts;
  for (auto [cmd, opts] : {std::pair{thm, &thm_opts}, std::pair{cor, &cor_opts}}) {
    cmd->add_option("--payoff", opts->payoff, "call:K=, straddle:K=, or file:<json>");
    cmd->add_option("--h", opts->h, "Hurst parameter (> 0.5)");
    cmd->add_option("--s0", opts->s0, "initial price");
    cmd->add_option("--k0", opts->k0, "cost coefficient k0");
    cmd->add_option("--n", opts->n, "trading grid sizes")->delimiter(',');
    cmd->add_option("--sim-steps", opts->sim_steps, "simulation steps (0 = 4 * max n)");
    cmd->add_option("--paths", opts->paths, "Monte Carlo paths");
    cmd->add_option("--seed", opts->seed, "experiment seed");
    cmd->add_option("--eps", opts->eps, "exceedance thresholds")->delimiter(',');
    cmd->add_option("--workers", opts->workers, "worker threads (0 = auto)");
    add_output_options(cmd, opts->out, cmd == thm ? "theorem.csv" : "corollary.csv");
  }
  cor->add_option("--alpha", cor_opts.alpha, "cost exponent, must exceed 1 - H");

  // surface
  auto* surf = app.add_subcommand("surface", "expected hedging error surface E(J)(K, H)");
  double s_kmin = 0.2, s_kmax = 3.0, s_kstep = 0.05;
  double s_hmin = 0.55, s_hmax = 0.95, s_hstep = 0.05;
  double s_k0 = figure_normalization_k0, s_tol = 1e-10;
  unsigned s_workers = 0;
  OutputOpts s_out;
  surf->add_option("--k-min", s_kmin, "smallest strike");
  surf->add_option("--k-max", s_kmax, "largest strike");
  surf->add_option("--k-step", s_kstep, "strike step");
  surf->add_option("--h-min", s_hmin, "smallest H");
  surf->add_option("--h-max", s_hmax, "largest H");
  surf->add_option("--h-step", s_hstep, "H step");
  surf->add_option("--k0", s_k0, "cost coefficient (default sqrt(pi/2))");
  surf->add_option("--tol", s_tol, "quadrature absolute tolerance");
  surf->add_option("--workers", s_workers, "worker threads (0 = auto)");
  add_output_options(surf, s_out, "surface.csv");

  // continuity
  auto* cont = app.add_subcommand("continuity", "E(J)(K, H) continuity as H decreases to 1/2");
  double c_k = 1.0, c_k0 = figure_normalization_k0, c_tol = 1e-10;
  std::vector<double> c_hlist;
  OutputOpts c_out;
  cont->add_option("--k", c_k, "strike");
  cont->add_option("--h-list", c_hlist, "H values decreasing to 1/2")->delimiter(',');
  cont->add_option("--k0", c_k0, "cost coefficient (default sqrt(pi/2))");
  cont->add_option("--tol", c_tol, "quadrature absolute tolerance");
  add_output_options(cont, c_out, "continuity.csv");

  // mc-vs-quad
  auto* mcq = app.add_subcommand("mc-vs-quad", "crossings Monte Carlo vs quadrature for E(J)");
  double m_k = 1.5, m_h = 0.75, m_k0 = figure_normalization_k0;
  std::size_t m_sim = 16384, m_paths = 10000;
  std::uint64_t m_seed = 7;
  unsigned m_workers = 0;
  OutputOpts m_out;
  mcq->add_option("--k", m_k, "strike");
  mcq->add_option("--h", m_h, "Hurst parameter");
  mcq->add_option("--sim-steps", m_sim, "simulation steps");
  mcq->add_option("--paths", m_paths, "Monte Carlo paths");
  mcq->add_option("--seed", m_seed, "experiment seed");
  mcq->add_option("--k0", m_k0, "cost coefficient (default sqrt(pi/2))");
  mcq->add_option("--workers", m_workers, "worker threads (0 = auto)");
  add_output_options(mcq, m_out, "mc_vs_quad.csv");

  std::string config_doc;
  for (auto* sub : {fbm, lt, hedge, thm, cor, surf, cont, mcq}) {
    sub->set_help_flag("--help", "print help");
    sub->add_option("--config", config_doc,
                    "flat key=value config file; keys mirror the flags, flags override");
  }

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = inject_config_tokens(std::move(args));
    std::reverse(args.begin(), args.end());  // CLI11 vector parse wants reverse order
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  try {
    if (fbm->parsed())
      return cmd_fbm_check(fbm_h, fbm_paths, fbm_steps, fbm_seed, fbm_workers, fbm_out, fbm_export);
    if (lt->parsed())
      return cmd_localtime(lt_h, lt_level, lt_paths, lt_meshes, lt_seed, lt_workers, lt_out);
    if (hedge->parsed())
      return cmd_hedge(hedge_payoff, hedge_h, hedge_s0, hedge_k0, hedge_alpha, hedge_n, hedge_sim,
                       hedge_seed, hedge_out);
    if (thm->parsed())
      return cmd_theorem(thm_opts.payoff, thm_opts.h, thm_opts.s0, thm_opts.k0, thm_opts.n,
                         thm_opts.sim_steps, thm_opts.paths, thm_opts.seed, thm_opts.eps,
                         thm_opts.workers, thm_opts.out, 0.0, false);
    if (cor->parsed())
      return cmd_theorem(cor_opts.payoff, cor_opts.h, cor_opts.s0, cor_opts.k0, cor_opts.n,
                         cor_opts.sim_steps, cor_opts.paths, cor_opts.seed, cor_opts.eps,
                         cor_opts.workers, cor_opts.out, cor_opts.alpha, true);
    if (surf->parsed())
      return cmd_surface(s_kmin, s_kmax, s_kstep, s_hmin, s_hmax, s_hstep, s_k0, s_tol, s_workers,
                         s_out);
    if (cont->parsed()) return cmd_continuity(c_k, c_hlist, c_k0, c_tol, c_out);
    if (mcq->parsed())
      return cmd_mc_vs_quad(m_k, m_h, m_sim, m_paths, m_seed, m_k0, m_workers, m_out);
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 1;
}
