#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "fbmhedge/fbm.hpp"
#include "fbmhedge/local_time.hpp"
#include "fbmhedge/parallel.hpp"
#include "fbmhedge/stats.hpp"

namespace fbmhedge {

// Cost coefficient under which J = K * l^H(ln K, [0,1]) for the call and
// the expected-error surface matches the reference figure: the general
// prefactor sqrt(2/pi) * k0 collapses to 1 at k0 = sqrt(pi/2).
inline const double figure_normalization_k0 = std::sqrt(std::numbers::pi / 2.0);

// E(J) for the European call:
//   sqrt(2/pi) k0 * K/sqrt(2 pi) * int_0^1 t^{-H} exp(-ln^2 K / (2 t^{2H})) dt.
inline double expected_hedging_error_call(double strike, const HurstParameter& h,
                                          double k0 = figure_normalization_k0,
                                          double abs_tol = 1e-10) {
  if (!(strike > 0.0))
    throw std::domain_error("expected_hedging_error_call: strike must be positive");
  const double prefactor = std::sqrt(2.0 / std::numbers::pi) * k0;
  return prefactor * strike * expected_local_time(std::log(strike), h, 1.0, abs_tol);
}

struct ErrorSurface {
  std::vector<double> strikes;
  std::vector<double> hursts;
  std::vector<double> values;  // row-major: values[si * hursts.size() + hi]
  double k0;
  double abs_tol;

  double at(std::size_t strike_index, std::size_t hurst_index) const {
    return values[strike_index * hursts.size() + hurst_index];
  }

  // index of the strike maximizing E(J) at fixed H
  std::size_t argmax_strike(std::size_t hurst_index) const {
    std::size_t best = 0;
    for (std::size_t si = 1; si < strikes.size(); ++si)
      if (at(si, hurst_index) > at(best, hurst_index)) best = si;
    return best;
  }
};

// Default figure grids: K in [0.2, 3] step 0.05, H in [0.55, 0.95] step 0.05.
inline std::vector<double> default_strike_grid() {
  std::vector<double> ks;
  for (int i = 0; i <= 56; ++i) ks.push_back(static_cast<double>(20 + 5 * i) / 100.0);
  return ks;
}

inline std::vector<double> default_hurst_grid() {
  std::vector<double> hs;
  for (int i = 0; i <= 8; ++i) hs.push_back(static_cast<double>(55 + 5 * i) / 100.0);
  return hs;
}

inline ErrorSurface error_surface(std::span<const double> strikes, std::span<const double> hursts,
                                  double k0 = figure_normalization_k0, double abs_tol = 1e-10,
                                  unsigned workers = 0) {
  if (strikes.empty() || hursts.empty())
    throw std::domain_error("error_surface: grids must be nonempty");
  std::vector<HurstParameter> hs;
  hs.reserve(hursts.size());
  for (double h : hursts) hs.emplace_back(h);
  for (double k : strikes)
    if (!(k > 0.0)) throw std::domain_error("error_surface: strikes must be positive");

  ErrorSurface surface{{strikes.begin(), strikes.end()},
                       {hursts.begin(), hursts.end()},
                       std::vector<double>(strikes.size() * hursts.size()),
                       k0,
                       abs_tol};
  const std::size_t cells = surface.values.size();
  parallel_for_blocks(cells, workers == 0 ? default_worker_count() : workers,
                      [&](std::size_t begin, std::size_t end) {
                        for (std::size_t c = begin; c < end; ++c) {
                          const std::size_t si = c / hursts.size();
                          const std::size_t hi = c % hursts.size();
                          surface.values[c] =
                              expected_hedging_error_call(strikes[si], hs[hi], k0, abs_tol);
                        }
                      });
  return surface;
}

struct ContinuityRow {
  double hurst;
  double value;
  double gap_to_limit;
};

struct ContinuityStudy {
  double strike;
  double limit_value;  // E(J) at H = 1/2, the Brownian local-time limit
  std::vector<ContinuityRow> rows;
  bool gaps_decreasing;
};

// Numerical rendering of the H -> 1/2 continuity: E(J)(K, H) approaches the
// Brownian value monotonically along a sequence of H decreasing to 1/2.
inline ContinuityStudy h_continuity_study(double strike, std::span<const double> hursts,
                                          double k0 = figure_normalization_k0,
                                          double abs_tol = 1e-10) {
  if (hursts.empty())
    throw std::domain_error("h_continuity_study: need at least one H");
  double prev = std::numeric_limits<double>::infinity();
  for (double h : hursts) {
    if (!(h > 0.5 && h < 1.0))
      throw std::domain_error("h_continuity_study: H values must lie in (1/2, 1)");
    if (!(h < prev))
      throw std::domain_error("h_continuity_study: H values must decrease towards 1/2");
    prev = h;
  }
  ContinuityStudy study{strike,
                        expected_hedging_error_call(strike, HurstParameter(0.5), k0, abs_tol),
                        {},
                        true};
  double prev_gap = std::numeric_limits<double>::infinity();
  for (double h : hursts) {
    const double value = expected_hedging_error_call(strike, HurstParameter(h), k0, abs_tol);
    const double gap = std::abs(value - study.limit_value);
    if (gap > prev_gap) study.gaps_decreasing = false;
    prev_gap = gap;
    study.rows.push_back({h, value, gap});
  }
  return study;
}

struct McQuadReport {
  double strike;
  double hurst;
  std::size_t sim_steps;
  std::size_t paths;
  std::uint64_t seed;
  double mc_mean;
  double mc_stderr;
  double quadrature_value;
  double z_score;
};

// Cross-validates the two independent renderings of K E l^H(ln K, [0,1]):
// Monte Carlo crossings estimation vs singular-integrand quadrature.
inline McQuadReport mc_vs_quadrature(double strike, const HurstParameter& h,
                                     std::size_t sim_steps, std::size_t paths, std::uint64_t seed,
                                     double k0 = figure_normalization_k0, unsigned workers = 0) {
  if (!(strike > 0.0))
    throw std::domain_error("mc_vs_quadrature: strike must be positive");
  if (sim_steps == 0 || paths < 2)
    throw std::domain_error("mc_vs_quadrature: need a grid and at least two paths");
  const double prefactor = std::sqrt(2.0 / std::numbers::pi) * k0;
  const double level = std::log(strike);
  const FbmCirculantSampler sampler(UniformGrid(1.0, sim_steps), h);
  std::vector<double> estimates(paths);
  parallel_for_blocks(paths, workers == 0 ? default_worker_count() : workers,
                      [&](std::size_t begin, std::size_t end) {
                        for (std::size_t p = begin; p < end; ++p) {
                          const FbmPath path = sampler.sample({seed, p});
                          estimates[p] =
                              prefactor * strike * estimate_local_time(path, level).value;
                        }
                      });
  const double mc_mean = mean(estimates);
  const double mc_stderr = standard_error(estimates);
  const double quad = expected_hedging_error_call(strike, h, k0);
  return {strike, h.value(), sim_steps, paths, seed, mc_mean, mc_stderr, quad,
          (mc_mean - quad) / mc_stderr};
}

}  // namespace fbmhedge
