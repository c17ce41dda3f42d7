#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace fbmhedge {

struct MeasureAtom {
  double location;
  double mass;
};

// Finite atomic Radon measure: the distributional second derivative f'' of
// a convex payoff. Atoms are kept sorted by location; duplicate locations
// are merged by adding masses.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;

  explicit AtomicMeasure(std::vector<MeasureAtom> atoms) {
    for (const auto& a : atoms) {
      if (!std::isfinite(a.location) || !std::isfinite(a.mass))
        throw std::domain_error("measure atoms must be finite");
      if (!(a.mass > 0.0))
        throw std::domain_error("measure masses must be positive");
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const MeasureAtom& x, const MeasureAtom& y) { return x.location < y.location; });
    for (const auto& a : atoms) {
      if (!atoms_.empty() && atoms_.back().location == a.location)
        atoms_.back().mass += a.mass;
      else
        atoms_.push_back(a);
    }
  }

  const std::vector<MeasureAtom>& atoms() const { return atoms_; }
  bool empty() const { return atoms_.empty(); }

  double total_mass() const {
    double m = 0.0;
    for (const auto& a : atoms_) m += a.mass;
    return m;
  }

 private:
  std::vector<MeasureAtom> atoms_;
};

// Convex payoff represented by (anchor point, base slope, atomic f''):
//   f(x)    = f(x0) + s (x - x0) + sum_j m_j [(x - a_j)^+ - (x0 - a_j)^+]
//   f'_-(x) = s + sum_{a_j < x} m_j
// The strict inequality in f'_- is the sgn(0) = -1 convention: at an atom
// the left derivative excludes the atom's mass. The affine part is not
// determined by the measure, so anchor and base slope are explicit.
class ConvexPayoff {
 public:
  ConvexPayoff(AtomicMeasure measure, double anchor_x, double anchor_value, double base_slope)
      : measure_(std::move(measure)),
        anchor_x_(anchor_x),
        anchor_value_(anchor_value),
        base_slope_(base_slope) {
    if (!std::isfinite(anchor_x) || !std::isfinite(anchor_value) || !std::isfinite(base_slope))
      throw std::domain_error("payoff anchor and base slope must be finite");
    // prefix_slopes_[k] = base slope plus the first k masses: the value of
    // f'_- on (a_k, a_{k+1}].
    prefix_slopes_.reserve(measure_.atoms().size() + 1);
    prefix_slopes_.push_back(base_slope_);
    for (const auto& a : measure_.atoms())
      prefix_slopes_.push_back(prefix_slopes_.back() + a.mass);
  }

  double operator()(double x) const {
    double value = anchor_value_ + base_slope_ * (x - anchor_x_);
    for (const auto& a : measure_.atoms())
      value += a.mass * (positive_part(x - a.location) - positive_part(anchor_x_ - a.location));
    return value;
  }

  double left_derivative(double x) const {
    const auto& atoms = measure_.atoms();
    const auto it = std::lower_bound(
        atoms.begin(), atoms.end(), x,
        [](const MeasureAtom& a, double v) { return a.location < v; });
    return prefix_slopes_[static_cast<std::size_t>(it - atoms.begin())];
  }

  const AtomicMeasure& measure() const { return measure_; }
  double anchor_x() const { return anchor_x_; }
  double anchor_value() const { return anchor_value_; }
  double base_slope() const { return base_slope_; }

  // (x - K)^+
  static ConvexPayoff call(double strike) {
    return ConvexPayoff(AtomicMeasure({{strike, 1.0}}), 0.0, positive_part(-strike), 0.0);
  }

  // |x - K|
  static ConvexPayoff straddle(double strike) {
    return ConvexPayoff(AtomicMeasure({{strike, 2.0}}), 0.0, std::abs(strike), -1.0);
  }

 private:
  static double positive_part(double t) { return t > 0.0 ? t : 0.0; }

  AtomicMeasure measure_;
  double anchor_x_;
  double anchor_value_;
  double base_slope_;
  std::vector<double> prefix_slopes_;
};

// Piecewise-linear interpolant of a convex function on [lo, hi] with m
// equal segments, expressed as a ConvexPayoff whose atoms are the slope
// jumps at interior breakpoints; outside [lo, hi] it extends linearly.
struct LinearApprox {
  std::vector<double> breakpoints;
  ConvexPayoff payoff;
};

inline LinearApprox build_linear_approx(const std::function<double(double)>& f, double lo,
                                        double hi, int segments) {
  if (segments < 2)
    throw std::domain_error("build_linear_approx: need at least two segments");
  if (!(lo < hi))
    throw std::domain_error("build_linear_approx: interval is empty");

  const std::size_t m = static_cast<std::size_t>(segments);
  std::vector<double> xs(m + 1), ys(m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m);
    ys[i] = f(xs[i]);
  }

  std::vector<double> slopes(m), jumps(m - 1);
  for (std::size_t i = 0; i < m; ++i) slopes[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
  double jump_scale = 0.0;
  double slope_scale = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    jumps[i] = slopes[i + 1] - slopes[i];
    jump_scale += std::abs(jumps[i]);
    slope_scale = std::max(slope_scale, std::abs(slopes[i]));
  }
  slope_scale = std::max(slope_scale, std::abs(slopes[m - 1]));

  // Slope jumps below 1e-12 of the total curvature are roundoff; the slope
  // scale is folded in so an exactly affine oracle does not trip the
  // convexity check on last-ulp slope noise.
  const double tol = 1e-12 * std::max(jump_scale, slope_scale);
  std::vector<MeasureAtom> atoms;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (jumps[i] < -tol)
      throw std::domain_error("build_linear_approx: function is not convex on the interval");
    if (jumps[i] > tol)
      atoms.push_back({xs[i + 1], jumps[i]});
  }

  return {std::move(xs), ConvexPayoff(AtomicMeasure(std::move(atoms)), lo, ys[0], slopes[0])};
}

struct ApproxDiagnosticsRow {
  int segments;
  double payoff_error;            // sup over probes |P_m - f|
  double derivative_error;        // sup over probes |(P_m)'_- - f'_-|
  double measure_integral_error;  // |int g dmu_m - reference|
};

// Convergence diagnostics for the linear approximation: payoff and
// left-derivative errors at probe points plus the weak-convergence error
// of the approximating measure against a reference value of int g dmu.
inline std::vector<ApproxDiagnosticsRow> approx_convergence_diagnostics(
    const std::function<double(double)>& f, const std::function<double(double)>& f_left_derivative,
    double lo, double hi, std::span<const int> segment_counts, std::span<const double> probes,
    const std::function<double(double)>& g, double g_integral_reference) {
  std::vector<ApproxDiagnosticsRow> rows;
  rows.reserve(segment_counts.size());
  for (int m : segment_counts) {
    const LinearApprox approx = build_linear_approx(f, lo, hi, m);
    ApproxDiagnosticsRow row{m, 0.0, 0.0, 0.0};
    for (double x : probes) {
      row.payoff_error = std::max(row.payoff_error, std::abs(approx.payoff(x) - f(x)));
      row.derivative_error = std::max(
          row.derivative_error, std::abs(approx.payoff.left_derivative(x) - f_left_derivative(x)));
    }
    double g_integral = 0.0;
    for (const auto& a : approx.payoff.measure().atoms()) g_integral += g(a.location) * a.mass;
    row.measure_integral_error = std::abs(g_integral - g_integral_reference);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fbmhedge
