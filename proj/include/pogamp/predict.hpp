#ifndef POGAMP_PREDICT_HPP
#define POGAMP_PREDICT_HPP

#include "pogamp/mcmc.hpp"
#include "pogamp/nngp.hpp"

namespace pogamp {

enum class Integrand { identity, indicator_above, square };

Integrand integrand_from_string(const std::string& name);
double apply_integrand(Integrand g, double threshold, double y);

struct PredictiveRequest {
  enum class Kind { sites, integral };
  Kind kind = Kind::sites;
  LocationSet sites;
  Integrand g = Integrand::identity;
  double threshold = 0.0;
  int strata = 1;           // m equal squares
  int points_per_draw = 1;  // uniform points per stratum per retained draw
};

struct NngpSettings {
  bool enabled = false;
  int mesh_resolution = 20;
  int m = 15;
};

// Per retained draw, one conditional draw of Y at `sites` given that draw's
// (anchors, observations, parameters). Under NNGP mode the mesh is sampled
// sequentially with (S_N, Y_o) kept in the conditioning set exactly, and the
// targets condition on their m nearest mesh sites plus S_N.
Matrix predictive_samples(const Rng& rng, const ChainOutput& chain, const LocationSet& obs_locs,
                          const Vector& y_o, const PogampModel& skeleton,
                          const LocationSet& sites, const NngpSettings& nngp = {},
                          int threads = 0);

// Stratified Monte Carlo estimate of integral_S g(Y(s)) ds: per stratum and
// retained draw, unveil Y at uniform points, average mu(stratum) g(Y), then
// sum the per-stratum estimators. Unveiled values are discarded per draw.
McEstimate functional_estimate(const Rng& rng, const ChainOutput& chain,
                               const LocationSet& obs_locs, const Vector& y_o,
                               const PogampModel& skeleton, const PredictiveRequest& req,
                               const NngpSettings& nngp = {}, int threads = 0);

CovKernel kernel_from_draw(const PogampModel& skeleton, const RetainedDraw& d);

}  // namespace pogamp

#endif
