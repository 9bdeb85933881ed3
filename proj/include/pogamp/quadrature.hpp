#ifndef POGAMP_QUADRATURE_HPP
#define POGAMP_QUADRATURE_HPP

#include <functional>

#include "pogamp/domain.hpp"

namespace pogamp {

// Adaptive 1-D quadrature on [a, b]. Throws QuadratureFailure.
double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double epsabs = 0.0, double epsrel = 1e-8);

// Adaptive 1-D quadrature over the whole real line.
double integrate_1d_real_line(const std::function<double(double)>& f,
                              double epsabs = 1e-12, double epsrel = 1e-8);

// Iterated adaptive quadrature over a rectangle, relative tolerance `epsrel`.
double integrate_2d(const std::function<double(double, double)>& f, const Domain& d,
                    double epsrel = 1e-6);

}  // namespace pogamp

#endif
