#pragma once

#include <functional>

namespace ewl::quad {

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (15-point rule, recursive bisection) for smooth
/// integrands on a finite interval. Relative tolerance, absolute floor `abs_tol`.
double adaptive(const Integrand& f, double lo, double hi, double rel_tol = 1e-12, double abs_tol = 0.0);

/// Double-exponential (tanh-sinh) rule; tolerates integrable algebraic or
/// logarithmic singularities at either endpoint.
double endpoint_singular(const Integrand& f, double lo, double hi, double rel_tol = 1e-12);

}  // namespace ewl::quad
