#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fbmhedge {

// Raised when a numerical procedure (factorization, quadrature, ...)
// fails to deliver its accuracy contract, as opposed to a precondition
// violation which throws std::domain_error.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Hurst parameter of fractional Brownian motion, restricted to (0,1).
// The hedging theorems additionally need H > 1/2; that is checked at the
// call sites so local-time estimation stays available for every H.
class HurstParameter {
 public:
  explicit HurstParameter(double h) : value_(h) {
    if (!(h > 0.0 && h < 1.0))
      throw std::domain_error("Hurst parameter must lie in (0,1), got " + std::to_string(h));
  }

  double value() const { return value_; }

 private:
  double value_;
};

// Uniform time grid on [0, horizon] with `steps` intervals, steps+1 nodes.
class UniformGrid {
 public:
  UniformGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
    if (!(horizon > 0.0))
      throw std::domain_error("grid horizon must be positive");
    if (steps == 0)
      throw std::domain_error("grid needs at least one step");
  }

  double horizon() const { return horizon_; }
  std::size_t steps() const { return steps_; }
  std::size_t node_count() const { return steps_ + 1; }
  double mesh() const { return horizon_ / static_cast<double>(steps_); }
  double time_at(std::size_t node) const {
    return horizon_ * static_cast<double>(node) / static_cast<double>(steps_);
  }

  bool operator==(const UniformGrid& other) const = default;

 private:
  double horizon_;
  std::size_t steps_;
};

}  // namespace fbmhedge
