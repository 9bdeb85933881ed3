#ifndef POGAMP_POGAMP_HPP
#define POGAMP_POGAMP_HPP

#include <functional>

#include "pogamp/fdist.hpp"
#include "pogamp/pointprocess.hpp"

namespace pogamp {

// The hierarchical triple (base GP, f, lambda) on a compact domain.
struct PogampModel {
  Domain domain;
  CovKernel kernel;  // base GP
  FDist f;
  Intensity intensity;

  void validate() const;
  // whether f reuses the base kernel (one factorization serves both)
  bool shared_scale() const;
};

struct PogampDraw {
  PointPattern n;
  Vector y_n;  // f-distributed values at the anchor events
  Vector y_r;  // GP-conditional values at the requested sites
};

// One draw of the hierarchy: N ~ PP(lambda), Y_N ~ f at S_N, then Y at s_r
// from the base-GP conditional (unconditional GP when N is empty).
PogampDraw simulate(Rng& rng, const PogampModel& model, const LocationSet& s_r);

// Radon-Nikodym weight f/g(Y_N) against the augmented-GP reference measure.
double rn_weight(const PogampModel& model, const PointPattern& n, const Vector& y_n);

struct McEstimate {
  double value = 0.0;
  double se = 0.0;
  long draws = 0;
};

// Rao-Blackwellized finite-dimensional density estimate at y: the average of
// the Gaussian conditional density of Y(s_r) given sampled (N, Y_N). The
// mixture over |N| is handled by sampling N, never truncated.
McEstimate fdd_density_mc(const PogampModel& model, const LocationSet& s_r,
                          const Vector& y, long mc_draws, const Rng& rng, int threads = 0);

// Same estimator across a grid of y vectors, sharing one set of (N, Y_N) draws.
std::vector<McEstimate> fdd_density_mc_grid(const PogampModel& model,
                                            const LocationSet& s_r,
                                            const std::vector<Vector>& ys, long mc_draws,
                                            const Rng& rng, int threads = 0);

// Monte Carlo KL divergence between the model and the augmented GP:
// E[log(f_N/g_N)(Y_N)] over (N, S_N, Y_N ~ f).
McEstimate kld_mc(const PogampModel& model, long mc_draws, const Rng& rng, int threads = 0);

// Sample covariance of (Y(s1), Y(s2)) across independent draws; s1 == s2
// gives the marginal variance.
McEstimate empirical_cov(const PogampModel& model, const Site& s1, const Site& s2,
                         long replicates, const Rng& rng, int threads = 0);

struct CoordinateKs {
  double statistic = 0.0;
  double p_value = 1.0;
};

struct SymmetryReport {
  double angle = 0.0;  // rotation that maps set_a onto set_b
  std::vector<CoordinateKs> per_coordinate;
  CoordinateKs vector_sum;
  double min_p_value() const;
};

// Rotation-based distributional check of Y(set_a) =d Y(set_b). Report only;
// no pass/fail policy baked in. Throws NotSymmetric when no domain rotation
// maps set_a onto set_b (ordered, within 1e-9).
SymmetryReport symmetry_check(const PogampModel& model, const LocationSet& set_a,
                              const LocationSet& set_b, long replicates, const Rng& rng,
                              int threads = 0);

struct LadderPoint {
  double lambda = 0.0;
  double ks_to_f = 0.0;   // KS distance of the empirical marginal to f at s_r
  double ks_to_gp = 0.0;  // and to the base-GP marginal
};

// Empirical check of the weak-convergence ladder: per lambda, the KS distance
// of the marginal at a single site s_r to the f marginal.
std::vector<LadderPoint> convergence_ladder(const PogampModel& model_template,
                                            const std::vector<double>& lambdas,
                                            const Site& s_r, long replicates, const Rng& rng,
                                            int threads = 0);

// R independent draws of Y(s_r); row i comes from rng substream i.
Matrix simulate_values(const PogampModel& model, const LocationSet& s_r, long replicates,
                       const Rng& rng, int threads = 0);

// Numeric CDF of a 1-D density on an equispaced grid (normalized trapezoid).
struct GridCdf {
  std::vector<double> x;
  std::vector<double> cdf;
  double operator()(double v) const;
};
GridCdf grid_cdf_from_logpdf(const std::function<double(double)>& logpdf, double lo,
                             double hi, int points);

}  // namespace pogamp

#endif
