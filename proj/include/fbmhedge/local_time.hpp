#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>

#include "fbmhedge/fbm.hpp"
#include "fbmhedge/quadrature.hpp"

namespace fbmhedge {

// Node index range [first, last] into a path; the segments inspected are
// first..last-1 -> first+1..last.
struct NodeRange {
  std::size_t first;
  std::size_t last;
};

inline NodeRange full_range(const FbmPath& path) { return {0, path.grid.steps()}; }

struct CrossingCount {
  double level;
  NodeRange range;
  long count;
};

// Number of level crossings of the polygonal interpolant, counted as
// strict sign changes across consecutive nodes. A node sitting exactly on
// the level contributes nothing by itself (grid times are excluded from
// the crossing set; exact hits have probability zero anyway).
inline CrossingCount count_crossings(const FbmPath& path, double level, NodeRange range) {
  if (range.first > range.last || range.last > path.grid.steps())
    throw std::domain_error("count_crossings: index range outside the path");
  long count = 0;
  for (std::size_t i = range.first; i < range.last; ++i) {
    const double a = path.values[i];
    const double b = path.values[i + 1];
    if ((a < level && b > level) || (a > level && b < level)) ++count;
  }
  return {level, range, count};
}

inline double crossing_scale(double delta, double hurst) {
  return std::sqrt(std::numbers::pi / 2.0) * std::pow(delta, 1.0 - hurst);
}

struct LocalTimeEstimate {
  double level;
  double t_begin;
  double t_end;
  double delta;
  double hurst;
  long crossings;
  double value;  // sqrt(pi/2) * delta^{1-H} * crossings
};

inline LocalTimeEstimate estimate_local_time(const FbmPath& path, double level, NodeRange range) {
  const CrossingCount c = count_crossings(path, level, range);
  const double delta = path.grid.mesh();
  const double h = path.hurst.value();
  return {level,
          path.grid.time_at(range.first),
          path.grid.time_at(range.last),
          delta,
          h,
          c.count,
          crossing_scale(delta, h) * static_cast<double>(c.count)};
}

inline LocalTimeEstimate estimate_local_time(const FbmPath& path, double level) {
  return estimate_local_time(path, level, full_range(path));
}

// Occupation-density estimate: exact Lebesgue time the polygonal path
// spends in (level-eps, level+eps), divided by 2*eps. An independent
// estimator of the same local time, used as a cross-check oracle for the
// crossings estimate. Diverges on paths that sit exactly at the level
// (excluded a.s. for fBm).
inline double occupation_histogram_oracle(const FbmPath& path, double level, double bandwidth,
                                          NodeRange range) {
  if (!(bandwidth > 0.0))
    throw std::domain_error("occupation_histogram_oracle: bandwidth must be positive");
  if (range.first > range.last || range.last > path.grid.steps())
    throw std::domain_error("occupation_histogram_oracle: index range outside the path");
  const double lo_band = level - bandwidth;
  const double hi_band = level + bandwidth;
  const double delta = path.grid.mesh();
  double time_in_band = 0.0;
  for (std::size_t i = range.first; i < range.last; ++i) {
    const double a = path.values[i];
    const double b = path.values[i + 1];
    const double seg_lo = std::min(a, b);
    const double seg_hi = std::max(a, b);
    if (seg_lo == seg_hi) {
      if (seg_lo > lo_band && seg_lo < hi_band) time_in_band += delta;
      continue;
    }
    const double overlap = std::min(seg_hi, hi_band) - std::max(seg_lo, lo_band);
    if (overlap > 0.0) time_in_band += delta * overlap / (seg_hi - seg_lo);
  }
  return time_in_band / (2.0 * bandwidth);
}

inline double occupation_histogram_oracle(const FbmPath& path, double level, double bandwidth) {
  return occupation_histogram_oracle(path, level, bandwidth, full_range(path));
}

// Default oracle bandwidth, tied to the mesh.
inline double default_oracle_bandwidth(double delta, double hurst) {
  return 20.0 * std::pow(delta, hurst);
}

// E l^H(a, [0,T]) = (2 pi)^{-1/2} int_0^T t^{-H} exp(-a^2 / (2 t^{2H})) dt.
// Computed after the substitution u = t^{1-H}, which removes the t^{-H}
// endpoint singularity analytically; at a = 0 the transformed integrand is
// constant, so the closed forms T^{1-H} / ((1-H) sqrt(2 pi)) come out at
// machine precision.
inline double expected_local_time(double level, const HurstParameter& h, double horizon,
                                  double abs_tol = 1e-10) {
  if (!(horizon > 0.0))
    throw std::domain_error("expected_local_time: horizon must be positive");
  const double hv = h.value();
  const double upper = std::pow(horizon, 1.0 - hv);
  const double beta = 2.0 * hv / (1.0 - hv);
  const double half_a2 = 0.5 * level * level;
  auto integrand = [half_a2, beta](double u) {
    if (u <= 0.0) return half_a2 == 0.0 ? 1.0 : 0.0;
    return std::exp(-half_a2 * std::pow(u, -beta));
  };
  const double prefactor = 1.0 / ((1.0 - hv) * std::sqrt(2.0 * std::numbers::pi));
  const auto q = integrate_to_tolerance(integrand, 0.0, upper, abs_tol / prefactor);
  return prefactor * q.value;
}

}  // namespace fbmhedge
