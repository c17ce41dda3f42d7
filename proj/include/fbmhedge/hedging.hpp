#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbmhedge/convex_payoff.hpp"
#include "fbmhedge/fbm.hpp"
#include "fbmhedge/local_time.hpp"
#include "fbmhedge/parallel.hpp"
#include "fbmhedge/rng.hpp"
#include "fbmhedge/stats.hpp"

namespace fbmhedge {

// Proportional transaction cost coefficient k_n = k0 * n^{-alpha}.
// The theorem regime is alpha = 1-H; the corollary regime alpha > 1-H.
class CostSchedule {
 public:
  CostSchedule(double k0, double alpha) : k0_(k0), alpha_(alpha) {
    if (!(k0 >= 0.0))
      throw std::domain_error("cost schedule: k0 must be nonnegative");
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw std::domain_error("cost schedule: alpha must lie in (0,1]");
  }

  static CostSchedule theorem_regime(double k0, const HurstParameter& h) {
    return CostSchedule(k0, 1.0 - h.value());
  }

  double k0() const { return k0_; }
  double alpha() const { return alpha_; }
  double rate(std::size_t intervals) const {
    return k0_ * std::pow(static_cast<double>(intervals), -alpha_);
  }

 private:
  double k0_;
  double alpha_;
};

// One realized discrete hedge along a trading-grid price path.
struct HedgeRun {
  std::size_t intervals;  // n
  double hurst;           // of the driving path
  CostSchedule schedule;
  double cost_rate;               // k_n actually charged
  std::vector<double> positions;  // theta_i = f'_-(S_{t_{i-1}}), i = 1..n
  double payoff_at_start;         // f(S_0)
  double trading_gain;            // sum theta_i (S_i - S_{i-1})
  double turnover_cost_raw;       // sum S_{i-1} |f'_-(S_i) - f'_-(S_{i-1})|
  double terminal_value;          // f(S_0) + gain - k_n * turnover
  double s_start;
  double s_terminal;
};

// Runs the discretized hedge: hold theta_i = f'_-(S_{t_{i-1}}) over
// (t_{i-1}, t_i], pay k_n * S_{t_{i-1}} |f'_- difference| per rebalance.
// No transaction cost is charged for entering the position at t = 0.
inline HedgeRun run_hedge(const ConvexPayoff& payoff, const PricePath& prices,
                          const CostSchedule& schedule) {
  const std::size_t n = prices.prices.empty() ? 0 : prices.prices.size() - 1;
  if (n < 1)
    throw std::domain_error("run_hedge: need at least one trading interval");
  for (double p : prices.prices)
    if (!(p > 0.0)) throw std::domain_error("run_hedge: prices must be strictly positive");

  std::vector<double> positions(n), gains(n), turnovers(n);
  double prev_deriv = payoff.left_derivative(prices.prices[0]);
  for (std::size_t i = 1; i <= n; ++i) {
    const double s_prev = prices.prices[i - 1];
    const double s_now = prices.prices[i];
    positions[i - 1] = prev_deriv;
    gains[i - 1] = prev_deriv * (s_now - s_prev);
    const double next_deriv = payoff.left_derivative(s_now);
    turnovers[i - 1] = s_prev * std::abs(next_deriv - prev_deriv);
    prev_deriv = next_deriv;
  }

  const double gain = pairwise_sum(gains);
  const double turnover = pairwise_sum(turnovers);
  const double k_n = schedule.rate(n);
  const double f_s0 = payoff(prices.prices[0]);
  return {n,
          prices.underlying.hurst.value(),
          schedule,
          k_n,
          std::move(positions),
          f_s0,
          gain,
          turnover,
          f_s0 + gain - k_n * turnover,
          prices.prices[0],
          prices.prices.back()};
}

// Riemann-sum error of the hedging integral,
//   I1 = sum_i f'_-(S_{i-1}) (S_i - S_{i-1}) - [f(S_T) - f(S_0)],
// evaluated atom by atom: per atom a the contribution is the indicator
// Riemann sum minus the exact call-payoff difference. The affine part of
// the payoff telescopes to zero identically and is omitted, so affine
// payoffs give exactly zero.
inline double discretization_error(const ConvexPayoff& payoff, const PricePath& prices) {
  const std::size_t n = prices.prices.size() - 1;
  double total = 0.0;
  for (const auto& atom : payoff.measure().atoms()) {
    CompensatedSum riemann;
    for (std::size_t i = 1; i <= n; ++i) {
      if (prices.prices[i - 1] > atom.location)
        riemann.add(prices.prices[i] - prices.prices[i - 1]);
    }
    const double exact = std::max(prices.prices.back() - atom.location, 0.0) -
                         std::max(prices.prices.front() - atom.location, 0.0);
    total += atom.mass * (riemann.value() - exact);
  }
  return total;
}

struct ErrorDecomposition {
  double i1;              // discretization error of the stochastic integral
  double i2;              // Delta_n^{1-H} * turnover_cost_raw
  double realized_error;  // V_1(theta^n) - f(S_1), equals i1 - k0 * i2
};

// Splits the realized hedging error per the identity
// V_1(theta^n) - f(S_1) = I1_n - k0 * I2_n, valid in the alpha = 1-H regime.
inline ErrorDecomposition error_decomposition(const HedgeRun& run, const ConvexPayoff& payoff) {
  const double one_minus_h = 1.0 - run.hurst;
  if (std::abs(run.schedule.alpha() - one_minus_h) > 1e-12)
    throw std::domain_error("error_decomposition: run must use the theorem regime alpha = 1 - H");
  const double f_terminal = payoff(run.s_terminal);
  const double i1 = run.trading_gain - (f_terminal - run.payoff_at_start);
  const double i2 =
      std::pow(static_cast<double>(run.intervals), -one_minus_h) * run.turnover_cost_raw;
  return {i1, i2, run.terminal_value - f_terminal};
}

struct FrictionlessRow {
  std::size_t intervals;
  double i1;
};

// Frictionless Riemann-Stieltjes convergence: i1(n) on coarser and coarser
// restrictions of the same fine path. Almost-sure convergence to zero is
// the chain-rule statement for H > 1/2.
inline std::vector<FrictionlessRow> frictionless_convergence(const ConvexPayoff& payoff,
                                                             const PricePath& fine,
                                                             std::span<const std::size_t> n_values) {
  if (!(fine.underlying.hurst.value() > 0.5))
    throw std::domain_error("frictionless_convergence: requires H > 1/2");
  std::vector<FrictionlessRow> rows;
  rows.reserve(n_values.size());
  for (std::size_t n : n_values) {
    if (n == 0 || fine.underlying.grid.steps() % n != 0)
      throw std::domain_error("frictionless_convergence: n must divide the fine step count");
    const PricePath restricted = restrict_price_path(fine, n);
    rows.push_back({n, discretization_error(payoff, restricted)});
  }
  return rows;
}

// Per-path estimate of the limiting hedging error
//   J = sqrt(2/pi) k0 sum_j a_j mu(a_j) l^H(ln(a_j/s0), [0,1]),
// with the local time taken from the crossings estimator at the path's own
// (finest available) mesh. Atoms at nonpositive prices are rejected: the
// logarithm is undefined there and positive price paths never generate
// turnover across them.
inline double limit_error_j(const ConvexPayoff& payoff, const FbmPath& path, double k0,
                            double s0 = 1.0) {
  if (!(s0 > 0.0))
    throw std::domain_error("limit_error_j: s0 must be positive");
  double weighted = 0.0;
  for (const auto& atom : payoff.measure().atoms()) {
    if (!(atom.location > 0.0))
      throw std::domain_error("limit_error_j: measure atom at nonpositive price " +
                              std::to_string(atom.location));
    const LocalTimeEstimate est = estimate_local_time(path, std::log(atom.location / s0));
    weighted += atom.location * atom.mass * est.value;
  }
  return std::sqrt(2.0 / std::numbers::pi) * k0 * weighted;
}

struct ExperimentRow {
  std::size_t intervals;
  double mean_v1;
  double mean_d;
  double var_d;
  std::vector<double> exceedance;  // aligned with ExperimentReport::epsilons
  double mean_j_hat;
  double mc_stderr;  // standard error of D
};

struct ExperimentReport {
  double hurst;
  double s0;
  double k0;
  double alpha;
  std::size_t sim_steps;
  std::size_t paths;
  std::uint64_t seed;
  std::vector<double> epsilons;
  std::vector<ExperimentRow> rows;

  bool exceedance_nonincreasing(std::size_t eps_index) const {
    return rows.back().exceedance[eps_index] <= rows.front().exceedance[eps_index];
  }
  // final / initial exceedance; infinity when the initial frequency is 0.
  double exceedance_ratio(std::size_t eps_index) const {
    const double first = rows.front().exceedance[eps_index];
    const double last = rows.back().exceedance[eps_index];
    if (first == 0.0) return last == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return last / first;
  }
};

struct ExperimentConfig {
  double s0 = 1.0;
  double k0 = 1.0;
  std::vector<std::size_t> trading_grids;  // ascending n list
  std::size_t sim_steps = 0;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
  std::vector<double> epsilons = {0.1, 0.05, 0.02};
  unsigned workers = 0;  // 0 = hardware concurrency
};

namespace detail {

inline void validate_experiment(const HurstParameter& h, const ExperimentConfig& cfg) {
  if (!(h.value() > 0.5))
    throw std::domain_error("convergence experiments require H > 1/2");
  if (cfg.trading_grids.empty())
    throw std::domain_error("experiment needs a nonempty n list");
  if (cfg.paths == 0)
    throw std::domain_error("experiment needs at least one path");
  if (cfg.epsilons.empty())
    throw std::domain_error("experiment needs at least one epsilon");
  std::size_t prev = 0;
  for (std::size_t n : cfg.trading_grids) {
    if (n <= prev)
      throw std::domain_error("n list must be strictly increasing");
    if (cfg.sim_steps % n != 0)
      throw std::domain_error("every n must divide sim_steps");
    prev = n;
  }
  // the simulation grid must be at least 4x finer than the finest trading
  // grid, otherwise the pathwise J estimate is not meaningfully finer
  if (cfg.sim_steps / cfg.trading_grids.back() < 4)
    throw std::domain_error("sim_steps must be at least 4x the finest trading grid");
}

inline ExperimentReport run_convergence_experiment(const ConvexPayoff& payoff,
                                                   const HurstParameter& h,
                                                   const ExperimentConfig& cfg,
                                                   const CostSchedule& schedule,
                                                   bool subtract_j_hat) {
  validate_experiment(h, cfg);
  const std::size_t n_count = cfg.trading_grids.size();
  const FbmCirculantSampler sampler(UniformGrid(1.0, cfg.sim_steps), h);

  std::vector<double> j_hat(cfg.paths);
  std::vector<std::vector<double>> v1(n_count, std::vector<double>(cfg.paths));
  std::vector<std::vector<double>> d(n_count, std::vector<double>(cfg.paths));

  const unsigned workers = cfg.workers == 0 ? default_worker_count() : cfg.workers;
  parallel_for_blocks(cfg.paths, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const FbmPath path = sampler.sample({cfg.seed, p});
      const PricePath prices = to_price_path(path, cfg.s0);
      const double j = limit_error_j(payoff, path, cfg.k0, cfg.s0);
      for (std::size_t k = 0; k < n_count; ++k) {
        const PricePath restricted = restrict_price_path(prices, cfg.trading_grids[k]);
        const HedgeRun run = run_hedge(payoff, restricted, schedule);
        v1[k][p] = run.terminal_value;
        // D = V1 - [f(S1) - J_hat] evaluated through the decomposition
        // V1 - f(S1) = I1 - k_n * turnover; the atom-wise I1 avoids the
        // f(S0) + gain - f(S1) cancellation and vanishes identically for
        // affine payoffs.
        const double i1 = discretization_error(payoff, restricted);
        d[k][p] = i1 - run.cost_rate * run.turnover_cost_raw + (subtract_j_hat ? j : 0.0);
      }
      j_hat[p] = j;
    }
  });

  ExperimentReport report{h.value(), cfg.s0,  cfg.k0,       schedule.alpha(), cfg.sim_steps,
                          cfg.paths, cfg.seed, cfg.epsilons, {}};
  const double mean_j = mean(j_hat);
  for (std::size_t k = 0; k < n_count; ++k) {
    const double var_d = cfg.paths >= 2 ? sample_variance(d[k]) : 0.0;
    ExperimentRow row{cfg.trading_grids[k], mean(v1[k]), mean(d[k]), var_d, {}, mean_j, 0.0};
    row.mc_stderr = std::sqrt(row.var_d / static_cast<double>(cfg.paths));
    for (double eps : cfg.epsilons) {
      std::size_t exceed = 0;
      for (double x : d[k])
        if (std::abs(x) > eps) ++exceed;
      row.exceedance.push_back(static_cast<double>(exceed) / static_cast<double>(cfg.paths));
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace detail

// Monte Carlo rendering of the main theorem: with k_n = k0 n^{-(1-H)},
// V_1(theta^n) -> f(S_1) - J in probability. D_n = V_1 - [f(S_1) - J_hat]
// couples the hedge and the J estimate on the same path; convergence shows
// up as decreasing exceedance frequencies.
inline ExperimentReport theorem_convergence_experiment(const ConvexPayoff& payoff,
                                                       const HurstParameter& h,
                                                       const ExperimentConfig& cfg) {
  return detail::run_convergence_experiment(payoff, h, cfg,
                                            CostSchedule::theorem_regime(cfg.k0, h), true);
}

// Corollary regime alpha > 1-H: costs vanish fast enough for perfect
// replication in the limit, D_n = V_1 - f(S_1).
inline ExperimentReport corollary_fast_costs_experiment(const ConvexPayoff& payoff,
                                                        const HurstParameter& h, double alpha,
                                                        const ExperimentConfig& cfg) {
  if (!(alpha > 1.0 - h.value()))
    throw std::domain_error("corollary regime requires alpha > 1 - H");
  return detail::run_convergence_experiment(payoff, h, cfg, CostSchedule(cfg.k0, alpha), false);
}

}  // namespace fbmhedge
