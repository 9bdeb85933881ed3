#ifndef POGAMP_MCMC_HPP
#define POGAMP_MCMC_HPP

#include <functional>
#include <optional>

#include "pogamp/pogamp.hpp"

namespace pogamp {

struct GammaPrior {
  double shape = 2.0;
  double rate = 1.0;
  double mean() const { return shape / rate; }
};

struct LogNormalPrior {
  double mu_log = 0.0;
  double sd_log = 1.0;
};

struct NormalPrior {
  double mu = 0.0;
  double sd = 1.0;
};

struct PcPrior {
  double xi0 = 0.0;  // base value: the most complex accepted distribution
  double zeta = 1.0;
};

struct ParamPrior {
  enum class Kind { lognormal, normal, gamma, pc };
  Kind kind = Kind::lognormal;
  LogNormalPrior lognormal;
  NormalPrior normal;
  GammaPrior gamma;
  PcPrior pc;
};

struct PriorSpec {
  GammaPrior lambda_prior;
  ParamPrior sigma2;
  ParamPrior phi;
  ParamPrior tau2;
  ParamPrior alpha;
  ParamPrior nu;
  ParamPrior theta_lambda;  // applied to each positive intensity parameter
};

struct SampleFlags {
  bool sigma2 = true;
  bool phi = true;
  bool tau2 = false;
  bool alpha = false;
  bool nu = false;
  bool lambda = true;        // homogeneous conjugate block
  bool theta_lambda = false; // parametric intensity block
};

struct McmcConfig {
  long iterations = 4000;
  long burn_in = 2000;
  int thin = 1;
  int K = 0;  // subregion count; 0 picks the smallest perfect square with
              // expected events per square <= 5 under the lambda prior mean
  int M = 500;
  bool debug_checks = false;    // re-derive every cache each sweep and compare
  bool exact_inverses = false;  // replace Schur reuse with full re-inversion

  void validate() const {
    if (iterations < 0 || burn_in < 0 || burn_in > iterations)
      throw ConfigError("invalid iteration/burn_in counts");
    if (thin < 1) throw ConfigError("thin must be >= 1");
    if (M < 1) throw ConfigError("M must be >= 1");
  }
};

struct AcceptCounter {
  long accepted = 0;
  long proposed = 0;
  double rate() const {
    return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  }
};

struct BlockRates {
  AcceptCounter y_n, n_block, sigma2, phi, tau2, alpha, nu, theta_lambda;
};

struct PartitionGrid {
  Domain domain;
  int kx = 1, ky = 1;
  std::vector<Domain> tiles;

  int index_of(const Site& s) const { return partition_index(domain, kx, ky, s); }
  static PartitionGrid regular(const Domain& d, int K);
};

// Full sampler state. Anchor locations occupy the head of cache_no, so the
// N-block add/remove updates touch a contiguous index range.
struct PogampState {
  LocationSet obs_locs;
  Vector y_o;

  Domain domain;
  CovKernel kernel;
  FDist f;  // scale_kernel tracks `kernel` when share_kernel
  Intensity intensity;
  bool share_kernel = true;

  PointPattern n;
  Vector y_n;

  InverseCache cache_no;        // cov(Y_N ++ Y_o) under the base GP
  InverseCache cache_n;         // cov(Y_N) under the base GP
  InverseCache cache_f_kernel;  // f scale-kernel matrix at S_N (unused when shared)
  std::optional<PreparedF> f_prepared;

  // retrospectively unveiled surface values; must be empty after every
  // N-block update
  std::vector<std::pair<Site, double>> unveiled;

  long anchor_revision = 0;  // bumped on every accepted change of S_N

  const InverseCache& f_kernel_cache() const {
    return share_kernel ? cache_n : cache_f_kernel;
  }
  void rebuild_caches();      // direct inversions from current parameters
  void rebuild_f_prepared();  // from the cached f-kernel inverse
  void verify_caches(double tol) const;

  double log_f_anchors() const;            // log f_N(Y_N)
  double log_gp_anchors() const;           // log pi_G(Y_N)
  double log_gp_obs_given_anchors() const; // log pi_G(Y_o | Y_N)
};

// Random-walk proposal for the Y_N block. Covariance is
// exp(log_scale) * (2.38^2/dim) * base_cov with base_cov the f covariance at
// the current anchors under window-averaged parameters.
struct AdaptiveProposal {
  Matrix base_cov;
  SpdChol base_chol;
  double log_scale = 0.0;
  int dim = 0;
  double target = 0.234;
  long built_at_revision = -1;

  double step_sd() const { return std::exp(0.5 * log_scale) * 2.38 / std::sqrt(std::max(dim, 1)); }
};

AdaptiveProposal build_proposal(const FDist& f_avg, const LocationSet& anchors,
                                double log_scale, long revision, int low_dim_cutoff = 5);

// scale <- scale * exp(rate - target); base_cov from the window-averaged f
AdaptiveProposal adapt_proposal(double observed_rate, const FDist& f_window_avg,
                                const LocationSet& anchors, const AdaptiveProposal& prev,
                                long revision);

// ---- individual Gibbs blocks (public so tests can drive them) ----

void update_y_n(Rng& rng, PogampState& state, const AdaptiveProposal& proposal,
                AcceptCounter& counter);

bool update_n_block(Rng& rng, PogampState& state, const PartitionGrid& grid, int k,
                    bool exact_inverses, AcceptCounter& counter);

void update_lambda(Rng& rng, PogampState& state, const GammaPrior& prior);

void update_theta_lambda(Rng& rng, PogampState& state, const ParamPrior& prior,
                         std::vector<double>& log_step_sd, AcceptCounter& counter);

enum class ThetaMode { G, f, shared };

// One MH sub-step per sampled parameter; kernel parameters use mode G or
// shared, the f complexity parameters always use mode f.
struct ThetaScales {
  double sigma2 = -0.7, phi = -0.7, tau2 = -0.7, alpha = -0.7, nu = -0.7;  // log sd
};

void update_theta(Rng& rng, PogampState& state, const PriorSpec& priors,
                  const SampleFlags& flags, ThetaMode mode, ThetaScales& scales,
                  BlockRates& rates);

// ---- PC prior ----

// KLD(f_a || f_b) between standardized 1-D marginals, by adaptive quadrature.
double kld_1d(const F1d& fa, const F1d& fb);

struct PcResult {
  double logdensity = 0.0;
  double distance = 0.0;
  double deriv = 0.0;
  bool boundary = false;
};

// Eq-style PC prior zeta e^{-zeta d}|dd/dxi| with d = sqrt(2 KLD(xi, xi0));
// xi is alpha for skew families and nu for student_t.
PcResult pc_prior_logdensity(const FDist& family_template, double xi, double xi0,
                             double zeta);

// ---- driver ----

struct RetainedDraw {
  double sigma2, phi, tau2, alpha, nu, lambda;
  double intensity_a = 0.0, intensity_b = 0.0, intensity_c = 0.0;
  PointPattern n;
  Vector y_n;
};

struct ChainOutput {
  std::vector<std::string> param_names;
  Matrix draws;  // retained x params
  std::vector<long> n_trace;
  std::vector<RetainedDraw> states;
  BlockRates rates;       // whole run
  BlockRates rates_post;  // after burn-in (adaptation frozen)
  long iterations = 0, burn_in = 0;
  int thin = 1, K = 1, M = 500;
  std::uint64_t seed = 0;
  RetainedDraw initial_state{};  // echoed even for zero-iteration runs

  std::size_t retained() const { return static_cast<std::size_t>(draws.rows()); }
  Eigen::Index param_index(const std::string& name) const;
};

using SweepObserver = std::function<void(const PogampState&, long iteration)>;

PogampState make_initial_state(const LocationSet& obs_locs, const Vector& y_o,
                               const PogampModel& skeleton, const PriorSpec& priors,
                               const SampleFlags& flags);

int choose_subregions(const PogampModel& skeleton, const PriorSpec& priors);

ChainOutput run_gibbs(Rng& rng, const LocationSet& obs_locs, const Vector& y_o,
                      const PogampModel& skeleton, const PriorSpec& priors,
                      const SampleFlags& flags, const McmcConfig& config,
                      const SweepObserver& observer = {});

}  // namespace pogamp

#endif
