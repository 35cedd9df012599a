#pragma once

#include <functional>

namespace fdrelay::quad {

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;  // estimated
  int intervals = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_intervals = 4000;
};

/// Globally adaptive 21-point Gauss-Kronrod integration of f over the finite
/// interval [lo, hi]. Nodes never touch the endpoints, so integrable endpoint
/// singularities are tolerated. Throws NumericError with the achieved error
/// estimate if the tolerance is not met within max_intervals subdivisions.
QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureOptions& opts = {});

/// Integral over [0, inf) via the map t = scale * s / (1 - s), s in [0, 1).
QuadratureResult integrate_half_line(const std::function<double(double)>& f, double scale,
                                     const QuadratureOptions& opts = {});

}  // namespace fdrelay::quad
