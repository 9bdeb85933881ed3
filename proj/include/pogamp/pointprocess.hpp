#ifndef POGAMP_POINTPROCESS_HPP
#define POGAMP_POINTPROCESS_HPP

#include "pogamp/domain.hpp"
#include "pogamp/quadrature.hpp"

namespace pogamp {

enum class IntensityKind { homogeneous, parametric };
enum class IntensityForm { linear, gaussian_bump };

// Poisson-process intensity: a constant rate, or a closed-form parametric
// surface with a user-visible upper bound for thinning.
struct Intensity {
  IntensityKind kind = IntensityKind::homogeneous;
  double lambda = 1.0;  // homogeneous rate

  IntensityForm form = IntensityForm::linear;
  // linear: a + b x + c y (all >= 0); gaussian_bump: a + b exp(-|s-s0|^2/(2 w^2))
  double a = 0.0, b = 0.0, c = 0.0;
  Site s0{};
  double w = 1.0;
  double lambda_bar = 0.0;  // dominating rate for thinning, > 0 for parametric

  void validate(const Domain& d) const;
  double value(const Site& s) const;
  // analytic upper bound of value() over d (helper to populate lambda_bar)
  double analytic_bound(const Domain& d) const;
  bool has_closed_form_integral() const;
  double closed_form_integral(const Domain& d) const;

  static Intensity homogeneous_rate(double rate) {
    Intensity out;
    out.kind = IntensityKind::homogeneous;
    out.lambda = rate;
    return out;
  }
};

struct PointPattern {
  LocationSet events;
  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }
};

// Lambda_S = integral of the intensity over the domain. Uses the closed form
// when available, otherwise adaptive 2-D quadrature (1e-6 relative).
double intensity_integral(const Intensity& intensity, const Domain& domain,
                          bool force_quadrature = false);

// Homogeneous: |N| ~ Poisson(lambda mu(S)) with uniform events. Parametric:
// thinning of a homogeneous dominating process at rate lambda_bar.
PointPattern pp_sample(Rng& rng, const Intensity& intensity, const Domain& domain);

// -Lambda_S + sum_j log lambda(s_j), the unit-rate-dominated log density.
double pp_logdensity(const PointPattern& n, const Intensity& intensity,
                     const Domain& domain);

}  // namespace pogamp

#endif
