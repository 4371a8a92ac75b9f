#pragma once

#include <functional>

namespace orlfb {

/// Adaptive Simpson quadrature of f over [a, b] with relative tolerance rtol.
/// Throws NumericError if the recursion depth is exhausted before the local
/// error estimate falls under the tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rtol, double atol = 1e-300, int max_depth = 48);

}  // namespace orlfb
