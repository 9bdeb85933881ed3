#include "pogamp/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>

namespace pogamp {

namespace {

struct GslWorkspace {
  gsl_integration_workspace* ws;
  explicit GslWorkspace(std::size_t n) : ws(gsl_integration_workspace_alloc(n)) {}
  ~GslWorkspace() { gsl_integration_workspace_free(ws); }
};

double call_fn(double x, void* params) {
  auto* f = static_cast<const std::function<double(double)>*>(params);
  return (*f)(x);
}

struct HandlerGuard {
  gsl_error_handler_t* old;
  HandlerGuard() : old(gsl_set_error_handler_off()) {}
  ~HandlerGuard() { gsl_set_error_handler(old); }
};

}  // namespace

double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double epsabs, double epsrel) {
  HandlerGuard guard;
  GslWorkspace w(2000);
  gsl_function gf;
  gf.function = &call_fn;
  gf.params = const_cast<std::function<double(double)>*>(&f);
  double result = 0.0, abserr = 0.0;
  const int status =
      gsl_integration_qags(&gf, a, b, epsabs, epsrel, 2000, w.ws, &result, &abserr);
  if (status != GSL_SUCCESS && status != GSL_EROUND)
    throw QuadratureFailure("1-D quadrature failed: " + std::string(gsl_strerror(status)));
  return result;
}

double integrate_1d_real_line(const std::function<double(double)>& f, double epsabs,
                              double epsrel) {
  HandlerGuard guard;
  GslWorkspace w(2000);
  gsl_function gf;
  gf.function = &call_fn;
  gf.params = const_cast<std::function<double(double)>*>(&f);
  double result = 0.0, abserr = 0.0;
  const int status = gsl_integration_qagi(&gf, epsabs, epsrel, 2000, w.ws, &result, &abserr);
  if (status != GSL_SUCCESS && status != GSL_EROUND)
    throw QuadratureFailure("infinite-range quadrature failed: " +
                            std::string(gsl_strerror(status)));
  return result;
}

double integrate_2d(const std::function<double(double, double)>& f, const Domain& d,
                    double epsrel) {
  const std::function<double(double)> outer = [&](double x) {
    const std::function<double(double)> inner = [&, x](double y) { return f(x, y); };
    return integrate_1d(inner, d.y_min, d.y_max, 0.0, 0.1 * epsrel);
  };
  return integrate_1d(outer, d.x_min, d.x_max, 0.0, epsrel);
}

}  // namespace pogamp
