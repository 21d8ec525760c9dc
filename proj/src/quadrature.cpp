#include "ewl/quadrature.hpp"

#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ewl/error.hpp"

namespace ewl::quad {

double adaptive(const Integrand& f, double lo, double hi, double rel_tol, double abs_tol) {
  if (!(hi > lo)) return 0.0;
  double error = 0.0;
  double l1 = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 20, rel_tol, &error, &l1);
  if (!std::isfinite(value)) throw ComputationError("quadrature produced a non-finite value");
  if (error > std::max(abs_tol, 1e3 * rel_tol * l1) && error > 1e-300)
    throw ComputationError("adaptive quadrature did not converge (error estimate " + std::to_string(error) + ")");
  return value;
}

double endpoint_singular(const Integrand& f, double lo, double hi, double rel_tol) {
  if (!(hi > lo)) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  double error = 0.0;
  double l1 = 0.0;
  std::size_t levels = 0;
  const double value = rule.integrate(f, lo, hi, rel_tol, &error, &l1, &levels);
  if (!std::isfinite(value)) throw ComputationError("quadrature produced a non-finite value");
  return value;
}

}  // namespace ewl::quad
