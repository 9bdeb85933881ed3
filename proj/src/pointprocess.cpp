#include "pogamp/pointprocess.hpp"

#include <cmath>

#include "pogamp/stats.hpp"

namespace pogamp {

void Intensity::validate(const Domain& d) const {
  if (kind == IntensityKind::homogeneous) {
    if (!(lambda > 0.0)) throw ConfigError("homogeneous intensity must be > 0");
    return;
  }
  if (form == IntensityForm::linear) {
    if (a < 0.0 || b < 0.0 || c < 0.0)
      throw ConfigError("linear intensity coefficients must be >= 0");
  } else {
    if (a < 0.0 || b < 0.0 || !(w > 0.0))
      throw ConfigError("gaussian_bump intensity needs a,b >= 0 and w > 0");
  }
  // the intensity must not vanish identically
  if (intensity_integral(*this, d) <= 0.0)
    throw ConfigError("parametric intensity integrates to zero");
}

double Intensity::value(const Site& s) const {
  if (kind == IntensityKind::homogeneous) return lambda;
  if (form == IntensityForm::linear) return a + b * s.x + c * s.y;
  const double dx = s.x - s0.x, dy = s.y - s0.y;
  return a + b * std::exp(-(dx * dx + dy * dy) / (2.0 * w * w));
}

double Intensity::analytic_bound(const Domain& d) const {
  if (kind == IntensityKind::homogeneous) return lambda;
  if (form == IntensityForm::linear) {
    double best = 0.0;
    for (double x : {d.x_min, d.x_max})
      for (double y : {d.y_min, d.y_max}) best = std::max(best, a + b * x + c * y);
    return best;
  }
  return a + b;
}

bool Intensity::has_closed_form_integral() const { return true; }

double Intensity::closed_form_integral(const Domain& d) const {
  if (kind == IntensityKind::homogeneous) return lambda * d.area();
  if (form == IntensityForm::linear) {
    const double ax = 0.5 * (d.x_min + d.x_max);
    const double ay = 0.5 * (d.y_min + d.y_max);
    return (a + b * ax + c * ay) * d.area();
  }
  // separable Gaussian bump: 2 pi w^2 times the product of interval masses
  const double sxl = (d.x_min - s0.x) / w, sxu = (d.x_max - s0.x) / w;
  const double syl = (d.y_min - s0.y) / w, syu = (d.y_max - s0.y) / w;
  const double mass_x = norm_cdf(sxu) - norm_cdf(sxl);
  const double mass_y = norm_cdf(syu) - norm_cdf(syl);
  return a * d.area() + b * 2.0 * M_PI * w * w * mass_x * mass_y;
}

double intensity_integral(const Intensity& intensity, const Domain& domain,
                          bool force_quadrature) {
  if (!force_quadrature && intensity.has_closed_form_integral())
    return intensity.closed_form_integral(domain);
  return integrate_2d(
      [&](double x, double y) { return intensity.value(Site{x, y}); }, domain, 1e-6);
}

PointPattern pp_sample(Rng& rng, const Intensity& intensity, const Domain& domain) {
  PointPattern out;
  const bool homogeneous = intensity.kind == IntensityKind::homogeneous;
  double rate = intensity.lambda;
  if (!homogeneous) {
    rate = intensity.lambda_bar;
    if (!(rate > 0.0))
      throw UnboundedIntensity("parametric intensity requires lambda_bar > 0");
  }
  const long count = rng.poisson(rate * domain.area());
  out.events.sites.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    Site s{rng.uniform(domain.x_min, domain.x_max), rng.uniform(domain.y_min, domain.y_max)};
    if (homogeneous) {
      out.events.sites.push_back(s);
    } else {
      // thinning against the dominating rate
      if (rng.uniform() * rate <= intensity.value(s)) out.events.sites.push_back(s);
    }
  }
  return out;
}

double pp_logdensity(const PointPattern& n, const Intensity& intensity,
                     const Domain& domain) {
  double out = -intensity_integral(intensity, domain);
  for (const Site& s : n.events.sites) {
    const double v = intensity.value(s);
    out += std::log(v);
  }
  return out;
}

}  // namespace pogamp
