#pragma once

#include <string>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fbmhedge/grid.hpp"

namespace fbmhedge {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

// Adaptive Gauss-Kronrod driven to an absolute tolerance on the result,
// deepening the subdivision limit before giving up.
template <class F>
QuadratureResult integrate_to_tolerance(F&& f, double lo, double hi, double abs_tol) {
  namespace bq = boost::math::quadrature;
  double value = 0.0;
  double err = 0.0;
  constexpr struct {
    double rel_tol;
    unsigned max_depth;
  } stages[] = {{1e-10, 12}, {1e-13, 15}, {1e-15, 18}};
  for (const auto& stage : stages) {
    value = bq::gauss_kronrod<double, 15>::integrate(f, lo, hi, stage.max_depth, stage.rel_tol, &err);
    if (err <= abs_tol) return {value, err};
  }
  throw NumericError("quadrature did not converge: requested abs tol " + std::to_string(abs_tol) +
                     ", achieved " + std::to_string(err));
}

}  // namespace fbmhedge
