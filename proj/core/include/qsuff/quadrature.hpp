#pragma once

#include <functional>

#include "qsuff/matrix.hpp"

namespace qsuff {

struct QuadratureResult {
  Matrix value;
  double error_estimate = 0.0;
  int evaluations = 0;
  bool converged = true;
};

/// Adaptive 7/15-point Gauss–Kronrod integration of a matrix-valued function
/// over [a, b]. Intervals are bisected until the Kronrod–Gauss difference
/// meets the tolerance or `max_depth` is reached.
QuadratureResult integrate_gk15(const std::function<Matrix(double)>& f, double a, double b,
                                double abs_tol, double rel_tol, int max_depth = 40);

}  // namespace qsuff
