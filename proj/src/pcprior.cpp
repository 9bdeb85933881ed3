#include <cmath>
#include <limits>

#include "pogamp/mcmc.hpp"
#include "pogamp/quadrature.hpp"

namespace pogamp {

double kld_1d(const F1d& fa, const F1d& fb) {
  const auto integrand = [&](double x) {
    const double la = fa.logpdf(x);
    if (la < -700.0) return 0.0;  // negligible mass, avoids 0 * inf
    const double lb = fb.logpdf(x);
    return std::exp(la) * (la - lb);
  };
  return integrate_1d_real_line(integrand, 1e-12, 1e-8);
}

namespace {

F1d standardized_marginal(const FDist& family_template, double xi) {
  FDist f = family_template;
  if (f.family == FFamily::student_t)
    f.nu = xi;
  else if (f.has_tail() && f.has_skew())
    f.alpha = xi;  // skew_t: complexity parameter is the skewness loading
  else
    f.alpha = xi;
  return f_marginal_1d(f, 0.0, 1.0);
}

double sqrt2kld(const FDist& family_template, double xi, double xi0) {
  const F1d fa = standardized_marginal(family_template, xi);
  const F1d fb = standardized_marginal(family_template, xi0);
  const double kld = kld_1d(fa, fb);
  return std::sqrt(2.0 * std::max(kld, 0.0));
}

}  // namespace

PcResult pc_prior_logdensity(const FDist& family_template, double xi, double xi0,
                             double zeta) {
  if (!(zeta > 0.0)) throw ConfigError("PC prior rate zeta must be > 0");
  const bool is_nu = family_template.family == FFamily::student_t;
  const double lower = is_nu ? 2.0 : -std::numeric_limits<double>::infinity();
  if (is_nu && (!(xi > lower) || !(xi0 > lower)))
    throw DegreesOfFreedomTooSmall("PC prior on nu requires values > 2");

  const double h = 1e-4 * std::max(1.0, std::abs(xi));
  PcResult out;
  out.distance = sqrt2kld(family_template, xi, xi0);
  out.boundary = std::abs(xi - xi0) <= h;

  double deriv;
  const bool lower_ok = xi - h > lower;
  if (out.boundary) {
    // d has a kink at xi0; evaluate one-sided away from the base value
    const double side = (xi >= xi0 || !lower_ok) ? 1.0 : -1.0;
    deriv = (sqrt2kld(family_template, xi + side * h, xi0) - out.distance) / (side * h);
  } else if (!lower_ok) {
    deriv = (sqrt2kld(family_template, xi + h, xi0) - out.distance) / h;
  } else {
    deriv = (sqrt2kld(family_template, xi + h, xi0) -
             sqrt2kld(family_template, xi - h, xi0)) /
            (2.0 * h);
  }
  out.deriv = deriv;
  if (std::abs(deriv) < 1e-12)
    throw DerivativeDegenerate("PC prior: |dd/dxi| below 1e-12");
  out.logdensity = std::log(zeta) - zeta * out.distance + std::log(std::abs(deriv));
  return out;
}

}  // namespace pogamp
