#include "pogamp/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pogamp/stats.hpp"

namespace pogamp {

namespace {

void check_finite(double lr, const char* block) {
  if (std::isnan(lr))
    throw DivergentChain(std::string("non-finite log ratio in block ") + block);
}

Vector concat_values(const Vector& head, const Vector& tail) {
  Vector out(head.size() + tail.size());
  out.head(head.size()) = head;
  out.tail(tail.size()) = tail;
  return out;
}

double log_prior_value(const ParamPrior& p, double value, const FDist& f_template) {
  switch (p.kind) {
    case ParamPrior::Kind::lognormal: {
      if (!(value > 0.0)) return -std::numeric_limits<double>::infinity();
      const double z = (std::log(value) - p.lognormal.mu_log) / p.lognormal.sd_log;
      return -std::log(value) - std::log(p.lognormal.sd_log) -
             0.5 * std::log(2.0 * M_PI) - 0.5 * z * z;
    }
    case ParamPrior::Kind::normal: {
      const double z = (value - p.normal.mu) / p.normal.sd;
      return -std::log(p.normal.sd) - 0.5 * std::log(2.0 * M_PI) - 0.5 * z * z;
    }
    case ParamPrior::Kind::gamma: {
      if (!(value > 0.0)) return -std::numeric_limits<double>::infinity();
      return p.gamma.shape * std::log(p.gamma.rate) - std::lgamma(p.gamma.shape) +
             (p.gamma.shape - 1.0) * std::log(value) - p.gamma.rate * value;
    }
    case ParamPrior::Kind::pc:
      return pc_prior_logdensity(f_template, value, p.pc.xi0, p.pc.zeta).logdensity;
  }
  return 0.0;
}

}  // namespace

PartitionGrid PartitionGrid::regular(const Domain& d, int K) {
  PartitionGrid grid;
  grid.domain = d;
  const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(K))));
  if (k * k != K) throw InvalidPartition("K must be a perfect square");
  grid.kx = k;
  grid.ky = k;
  grid.tiles = partition_domain(d, k, k);
  return grid;
}

void PogampState::rebuild_caches() {
  const LocationSet joint = LocationSet::concat(n.events, obs_locs);
  cache_no = make_inverse_cache(joint, kernel);
  cache_n = n.events.empty() ? InverseCache::empty() : make_inverse_cache(n.events, kernel);
  if (!share_kernel)
    cache_f_kernel = n.events.empty() ? InverseCache::empty()
                                      : make_inverse_cache(n.events, f.scale_kernel);
  rebuild_f_prepared();
}

void PogampState::rebuild_f_prepared() {
  if (n.events.empty()) {
    f_prepared.emplace(f, LocationSet{});
    return;
  }
  const InverseCache& c = f_kernel_cache();
  f_prepared.emplace(f, n.events, c.inv, c.logdet);
}

void PogampState::verify_caches(double tol) const {
  const LocationSet joint = LocationSet::concat(n.events, obs_locs);
  const InverseCache fresh_no = make_inverse_cache(joint, kernel);
  double gap = (fresh_no.inv - cache_no.inv).cwiseAbs().maxCoeff();
  if (!n.events.empty()) {
    const InverseCache fresh_n = make_inverse_cache(n.events, kernel);
    gap = std::max(gap, (fresh_n.inv - cache_n.inv).cwiseAbs().maxCoeff());
    if (!share_kernel) {
      const InverseCache fresh_f = make_inverse_cache(n.events, f.scale_kernel);
      gap = std::max(gap, (fresh_f.inv - cache_f_kernel.inv).cwiseAbs().maxCoeff());
    }
  }
  if (gap > tol)
    throw PogampError("cache coherence violated: max gap " + std::to_string(gap));
}

double PogampState::log_f_anchors() const {
  if (n.events.empty()) return 0.0;
  return f_prepared->logdensity(y_n);
}

double PogampState::log_gp_anchors() const {
  if (n.events.empty()) return 0.0;
  return mvn_logdensity_prec(y_n, Vector::Constant(y_n.size(), kernel.mean), cache_n.inv,
                             cache_n.logdet);
}

double PogampState::log_gp_obs_given_anchors() const {
  const Vector joint = concat_values(y_n, y_o);
  const double lj = mvn_logdensity_prec(joint, Vector::Constant(joint.size(), kernel.mean),
                                        cache_no.inv, cache_no.logdet);
  return lj - log_gp_anchors();
}

AdaptiveProposal build_proposal(const FDist& f_avg, const LocationSet& anchors,
                                double log_scale, long revision, int low_dim_cutoff) {
  AdaptiveProposal out;
  out.dim = static_cast<int>(anchors.size());
  out.log_scale = log_scale;
  out.built_at_revision = revision;
  out.target = out.dim > low_dim_cutoff ? 0.234 : 0.44;
  if (out.dim == 0) return out;
  out.base_cov = fdist_cov(f_avg, anchors);
  out.base_chol = cholesky(out.base_cov);
  return out;
}

AdaptiveProposal adapt_proposal(double observed_rate, const FDist& f_window_avg,
                                const LocationSet& anchors, const AdaptiveProposal& prev,
                                long revision) {
  const double log_scale = prev.log_scale + (observed_rate - prev.target);
  return build_proposal(f_window_avg, anchors, log_scale, revision);
}

void update_y_n(Rng& rng, PogampState& state, const AdaptiveProposal& proposal,
                AcceptCounter& counter) {
  if (state.n.events.empty()) return;  // block is skipped when N is empty
  if (proposal.dim != static_cast<int>(state.n.events.size()))
    throw PogampError("update_y_n: proposal dimension does not match |N|");

  Vector z(state.y_n.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  const Vector step = proposal.step_sd() * proposal.base_chol.apply_factor(z);
  const Vector y_star = state.y_n + step;

  const double cur = state.log_f_anchors() + state.log_gp_obs_given_anchors();

  const Vector joint_star = concat_values(y_star, state.y_o);
  const double gp_obs_star =
      mvn_logdensity_prec(joint_star, Vector::Constant(joint_star.size(), state.kernel.mean),
                          state.cache_no.inv, state.cache_no.logdet) -
      mvn_logdensity_prec(y_star, Vector::Constant(y_star.size(), state.kernel.mean),
                          state.cache_n.inv, state.cache_n.logdet);
  const double prop = state.f_prepared->logdensity(y_star) + gp_obs_star;

  const double lr = prop - cur;
  check_finite(lr, "Y_N");
  ++counter.proposed;
  if (std::log(rng.uniform()) < lr) {
    state.y_n = y_star;
    ++counter.accepted;
  }
}

bool update_n_block(Rng& rng, PogampState& state, const PartitionGrid& grid, int k,
                    bool exact_inverses, AcceptCounter& counter) {
  const Domain& tile = grid.tiles[static_cast<std::size_t>(k)];

  std::vector<int> idx_k;
  std::vector<int> idx_keep;
  for (std::size_t i = 0; i < state.n.events.size(); ++i) {
    if (grid.index_of(state.n.events[i]) == k)
      idx_k.push_back(static_cast<int>(i));
    else
      idx_keep.push_back(static_cast<int>(i));
  }

  // proposal: the Poisson-process prior restricted to this tile
  const PointPattern n_star_k = pp_sample(rng, state.intensity, tile);
  const auto m_star = static_cast<Eigen::Index>(n_star_k.size());

  // unveil Y at the proposed locations from pi_G(. | Y_N, Y_o)
  Vector y_new(m_star);
  if (m_star > 0) {
    const Vector joint = concat_values(state.y_n, state.y_o);
    const GaussianConditional cond = gp_conditional(
        n_star_k.events, state.cache_no.locations, joint, state.kernel, state.cache_no);
    y_new = mvn_sample(rng, cond.mean, cond.cov);
    for (Eigen::Index i = 0; i < m_star; ++i)
      state.unveiled.emplace_back(n_star_k.events[static_cast<std::size_t>(i)], y_new(i));
  }

  const LocationSet keep_locs = state.n.events.subset(idx_keep);
  Vector y_keep(static_cast<Eigen::Index>(idx_keep.size()));
  for (std::size_t i = 0; i < idx_keep.size(); ++i)
    y_keep(static_cast<Eigen::Index>(i)) = state.y_n(idx_keep[i]);

  const LocationSet locs_star = LocationSet::concat(n_star_k.events, keep_locs);
  const Vector y_star = concat_values(y_new, y_keep);

  // remove the block's indices, handling the remove-everything edge
  const auto reduced = [&](const InverseCache& cache) {
    if (idx_k.empty()) return cache;
    if (static_cast<Eigen::Index>(idx_k.size()) == cache.dim())
      return InverseCache::empty();
    return inverse_remove(cache, idx_k);
  };

  // base-GP inverse at the proposed anchor set
  InverseCache cache_n_star;
  if (exact_inverses) {
    cache_n_star =
        locs_star.empty() ? InverseCache::empty() : make_inverse_cache(locs_star, state.kernel);
  } else {
    InverseCache minus = reduced(state.cache_n);
    cache_n_star = m_star == 0 ? std::move(minus)
                               : inverse_add(minus, n_star_k.events, state.kernel);
  }

  // f preparation at the proposed set (reusing the f-kernel inverse)
  InverseCache cache_f_star;
  const InverseCache* f_cache_star = &cache_n_star;
  if (!state.share_kernel) {
    if (exact_inverses) {
      cache_f_star = locs_star.empty() ? InverseCache::empty()
                                       : make_inverse_cache(locs_star, state.f.scale_kernel);
    } else {
      InverseCache minus = reduced(state.cache_f_kernel);
      cache_f_star = m_star == 0 ? std::move(minus)
                                 : inverse_add(minus, n_star_k.events, state.f.scale_kernel);
    }
    f_cache_star = &cache_f_star;
  }
  std::optional<PreparedF> f_star;
  if (locs_star.empty())
    f_star.emplace(state.f, LocationSet{});
  else
    f_star.emplace(state.f, locs_star, f_cache_star->inv, f_cache_star->logdet);

  // ratio in joint form: [pi_G(Y_N) f(Y_N*)] / [pi_G(Y_N*) f(Y_N)]
  const double gp_star =
      locs_star.empty() ? 0.0
                        : mvn_logdensity_prec(y_star,
                                              Vector::Constant(y_star.size(), state.kernel.mean),
                                              cache_n_star.inv, cache_n_star.logdet);
  const double lr = (state.log_gp_anchors() + f_star->logdensity(y_star)) -
                    (gp_star + state.log_f_anchors());
  check_finite(lr, "N");

  ++counter.proposed;
  bool accepted = false;
  if (std::log(rng.uniform()) < lr) {
    accepted = true;
    // displaced anchors become surface values; record, then discard below
    for (int i : idx_k)
      state.unveiled.emplace_back(state.n.events[static_cast<std::size_t>(i)],
                                  state.y_n(i));
    // joint cache follows the same remove/add (anchors sit at the head)
    if (exact_inverses) {
      state.cache_no =
          make_inverse_cache(LocationSet::concat(locs_star, state.obs_locs), state.kernel);
    } else {
      InverseCache minus =
          idx_k.empty() ? std::move(state.cache_no) : inverse_remove(state.cache_no, idx_k);
      state.cache_no = m_star == 0 ? std::move(minus)
                                   : inverse_add(minus, n_star_k.events, state.kernel);
    }
    state.n.events = locs_star;
    state.y_n = y_star;
    state.cache_n = std::move(cache_n_star);
    if (!state.share_kernel) state.cache_f_kernel = std::move(cache_f_star);
    state.f_prepared = std::move(f_star);
    ++counter.accepted;
    ++state.anchor_revision;
  }

  // retrospective discard: the virtual Y_u update
  state.unveiled.clear();
  return accepted;
}

void update_lambda(Rng& rng, PogampState& state, const GammaPrior& prior) {
  if (state.intensity.kind != IntensityKind::homogeneous)
    throw PogampError("update_lambda requires a homogeneous intensity");
  const double shape = prior.shape + static_cast<double>(state.n.events.size());
  const double rate = prior.rate + state.domain.area();
  state.intensity.lambda = rng.gamma(shape, 1.0 / rate);
}

void update_theta_lambda(Rng& rng, PogampState& state, const ParamPrior& prior,
                         std::vector<double>& log_step_sd, AcceptCounter& counter) {
  if (state.intensity.kind != IntensityKind::parametric)
    throw PogampError("update_theta_lambda requires a parametric intensity");
  std::vector<double*> params;
  Intensity& in = state.intensity;
  if (in.form == IntensityForm::linear)
    params = {&in.a, &in.b, &in.c};
  else
    params = {&in.a, &in.b};
  if (log_step_sd.size() != params.size()) log_step_sd.assign(params.size(), -0.7);

  for (std::size_t p = 0; p < params.size(); ++p) {
    const double cur = *params[p];
    if (!(cur > 0.0)) continue;  // zero components stay out of the model
    const double cand = cur * std::exp(std::exp(log_step_sd[p]) * rng.normal());

    const double cur_loglike = pp_logdensity(state.n, in, state.domain);
    const double cur_prior = log_prior_value(prior, cur, state.f) + std::log(cur);
    *params[p] = cand;
    in.lambda_bar = in.analytic_bound(state.domain);
    const double cand_loglike = pp_logdensity(state.n, in, state.domain);
    const double cand_prior = log_prior_value(prior, cand, state.f) + std::log(cand);

    const double lr = cand_loglike + cand_prior - cur_loglike - cur_prior;
    check_finite(lr, "theta_lambda");
    ++counter.proposed;
    if (std::log(rng.uniform()) < lr) {
      ++counter.accepted;
    } else {
      *params[p] = cur;
      in.lambda_bar = in.analytic_bound(state.domain);
    }
  }
}

namespace {

struct KernelCandidate {
  CovKernel kernel;
  InverseCache cache_no;
  InverseCache cache_n;
  InverseCache cache_f_kernel;
  std::optional<PreparedF> f_prepared;
};

// builds candidate caches for a proposed kernel (and matching f when shared)
KernelCandidate make_kernel_candidate(const PogampState& state, const CovKernel& kernel,
                                      const FDist& f) {
  KernelCandidate cand;
  cand.kernel = kernel;
  cand.cache_no =
      make_inverse_cache(LocationSet::concat(state.n.events, state.obs_locs), kernel);
  cand.cache_n =
      state.n.events.empty() ? InverseCache::empty() : make_inverse_cache(state.n.events, kernel);
  if (!state.share_kernel)
    cand.cache_f_kernel = state.n.events.empty()
                              ? InverseCache::empty()
                              : make_inverse_cache(state.n.events, f.scale_kernel);
  const InverseCache& fc = state.share_kernel ? cand.cache_n : cand.cache_f_kernel;
  if (state.n.events.empty())
    cand.f_prepared.emplace(f, LocationSet{});
  else
    cand.f_prepared.emplace(f, state.n.events, fc.inv, fc.logdet);
  return cand;
}

double candidate_log_target(const PogampState& state, const KernelCandidate& cand,
                            bool include_gp, bool include_f) {
  double out = 0.0;
  const Vector mu_n = Vector::Constant(state.y_n.size(), cand.kernel.mean);
  const double gp_anchors =
      state.n.events.empty()
          ? 0.0
          : mvn_logdensity_prec(state.y_n, mu_n, cand.cache_n.inv, cand.cache_n.logdet);
  if (include_gp) {
    const Vector joint = concat_values(state.y_n, state.y_o);
    const double gp_joint =
        mvn_logdensity_prec(joint, Vector::Constant(joint.size(), cand.kernel.mean),
                            cand.cache_no.inv, cand.cache_no.logdet);
    out += gp_joint - gp_anchors;
  }
  if (include_f)
    out += state.n.events.empty() ? 0.0 : cand.f_prepared->logdensity(state.y_n);
  return out;
}

}  // namespace

void update_theta(Rng& rng, PogampState& state, const PriorSpec& priors,
                  const SampleFlags& flags, ThetaMode mode, ThetaScales& scales,
                  BlockRates& rates) {
  const bool kernel_affects_f = state.share_kernel && mode != ThetaMode::G;
  const bool include_f_for_kernel = kernel_affects_f;

  struct KernelParam {
    bool enabled;
    double* value;
    const ParamPrior* prior;
    double* log_sd;
    AcceptCounter* counter;
  };
  KernelParam kparams[] = {
      {flags.sigma2, &state.kernel.sigma2, &priors.sigma2, &scales.sigma2, &rates.sigma2},
      {flags.phi, &state.kernel.phi, &priors.phi, &scales.phi, &rates.phi},
      {flags.tau2, &state.kernel.tau2, &priors.tau2, &scales.tau2, &rates.tau2},
  };

  if (mode != ThetaMode::f) {
    for (auto& kp : kparams) {
      if (!kp.enabled) continue;
      const double cur = *kp.value;
      const double cand_value = cur * std::exp(std::exp(*kp.log_sd) * rng.normal());

      CovKernel cand_kernel = state.kernel;
      // pointer arithmetic is fragile here; copy field by field
      if (kp.value == &state.kernel.sigma2) cand_kernel.sigma2 = cand_value;
      if (kp.value == &state.kernel.phi) cand_kernel.phi = cand_value;
      if (kp.value == &state.kernel.tau2) cand_kernel.tau2 = cand_value;

      FDist cand_f = state.f;
      if (state.share_kernel) cand_f.scale_kernel = cand_kernel;

      const KernelCandidate cand = make_kernel_candidate(state, cand_kernel, cand_f);
      const double cand_target =
          candidate_log_target(state, cand, true, include_f_for_kernel) +
          log_prior_value(*kp.prior, cand_value, cand_f) + std::log(cand_value);

      const double cur_target = state.log_gp_obs_given_anchors() +
                                (include_f_for_kernel ? state.log_f_anchors() : 0.0) +
                                log_prior_value(*kp.prior, cur, state.f) + std::log(cur);

      const double lr = cand_target - cur_target;
      check_finite(lr, "theta_G");
      ++kp.counter->proposed;
      if (std::log(rng.uniform()) < lr) {
        state.kernel = cand_kernel;
        state.f = cand_f;
        state.cache_no = cand.cache_no;
        state.cache_n = cand.cache_n;
        if (!state.share_kernel) state.cache_f_kernel = cand.cache_f_kernel;
        state.f_prepared = cand.f_prepared;
        ++kp.counter->accepted;
      }
    }
  }

  if (mode == ThetaMode::G) return;

  // f complexity parameters: only the f density enters the ratio
  struct FParam {
    bool enabled;
    bool positive_shift;  // nu is sampled as log(nu - 2)
    double FDist::* field;
    const ParamPrior* prior;
    double* log_sd;
    AcceptCounter* counter;
  };
  FParam fparams[] = {
      {flags.alpha && state.f.has_skew(), false, &FDist::alpha, &priors.alpha,
       &scales.alpha, &rates.alpha},
      {flags.nu && state.f.has_tail(), true, &FDist::nu, &priors.nu, &scales.nu,
       &rates.nu},
  };
  for (auto& fp : fparams) {
    if (!fp.enabled) continue;
    const double cur = state.f.*(fp.field);
    double cand_value, log_jacobian;
    if (fp.positive_shift) {
      const double shifted = std::log(cur - 2.0) + std::exp(*fp.log_sd) * rng.normal();
      cand_value = 2.0 + std::exp(shifted);
      if (cand_value > 200.0) {  // outside the model range: reject
        ++fp.counter->proposed;
        continue;
      }
      log_jacobian = std::log(cand_value - 2.0) - std::log(cur - 2.0);
    } else {
      cand_value = cur + std::exp(*fp.log_sd) * rng.normal();
      log_jacobian = 0.0;
    }

    FDist cand_f = state.f;
    cand_f.*(fp.field) = cand_value;
    std::optional<PreparedF> cand_prepared;
    if (state.n.events.empty())
      cand_prepared.emplace(cand_f, LocationSet{});
    else {
      const InverseCache& fc = state.f_kernel_cache();
      cand_prepared.emplace(cand_f, state.n.events, fc.inv, fc.logdet);
    }
    const double cand_loglike =
        state.n.events.empty() ? 0.0 : cand_prepared->logdensity(state.y_n);
    const double lr = cand_loglike + log_prior_value(*fp.prior, cand_value, cand_f) -
                      state.log_f_anchors() - log_prior_value(*fp.prior, cur, state.f) +
                      log_jacobian;
    check_finite(lr, "theta_f");
    ++fp.counter->proposed;
    if (std::log(rng.uniform()) < lr) {
      state.f = cand_f;
      state.f_prepared = std::move(cand_prepared);
      ++fp.counter->accepted;
    }
  }
}

int choose_subregions(const PogampModel& skeleton, const PriorSpec& priors) {
  const double expected =
      skeleton.intensity.kind == IntensityKind::homogeneous
          ? priors.lambda_prior.mean() * skeleton.domain.area()
          : intensity_integral(skeleton.intensity, skeleton.domain);
  const int k = std::max(
      1, static_cast<int>(std::ceil(std::sqrt(std::max(expected, 1.0) / 5.0))));
  return k * k;
}

PogampState make_initial_state(const LocationSet& obs_locs, const Vector& y_o,
                               const PogampModel& skeleton, const PriorSpec& priors,
                               const SampleFlags& flags) {
  if (obs_locs.size() < 2 || y_o.size() != static_cast<Eigen::Index>(obs_locs.size()))
    throw ConfigError("need at least 2 observations with matching locations");
  skeleton.validate();

  PogampState state;
  state.obs_locs = obs_locs;
  state.y_o = y_o;
  state.domain = skeleton.domain;
  state.kernel = skeleton.kernel;
  state.f = skeleton.f;
  state.intensity = skeleton.intensity;
  state.share_kernel = skeleton.shared_scale();

  if (flags.lambda && state.intensity.kind == IntensityKind::homogeneous)
    state.intensity.lambda = priors.lambda_prior.mean();

  // method of moments: sample variance -> sigma2 + tau2, variogram slope -> phi
  std::vector<double> yv(y_o.data(), y_o.data() + y_o.size());
  const double s2 = variance(yv);
  if (flags.sigma2) state.kernel.sigma2 = std::max(s2 - state.kernel.tau2, 0.1 * s2);
  if (flags.phi) {
    double num = 0.0, den = 0.0, dmax = 0.0;
    for (std::size_t i = 0; i < obs_locs.size(); ++i)
      for (std::size_t j = i + 1; j < obs_locs.size(); ++j)
        dmax = std::max(dmax, distance(obs_locs[i], obs_locs[j]));
    const double h0 = 0.25 * dmax;
    for (std::size_t i = 0; i < obs_locs.size(); ++i)
      for (std::size_t j = i + 1; j < obs_locs.size(); ++j) {
        const double h = distance(obs_locs[i], obs_locs[j]);
        if (h < h0) {
          const double dy = y_o(static_cast<Eigen::Index>(i)) -
                            y_o(static_cast<Eigen::Index>(j));
          num += 0.5 * dy * dy * h;
          den += h * h;
        }
      }
    // gamma(h) ~ slope*h near 0 with slope = sigma2/phi
    const double slope = den > 0.0 ? num / den : 0.0;
    if (slope > 0.0)
      state.kernel.phi = std::clamp(state.kernel.sigma2 / slope, 0.01 * dmax, 2.0 * dmax);
  }
  if (state.share_kernel) state.f.scale_kernel = state.kernel;

  state.n.events = LocationSet{};
  state.y_n.resize(0);
  state.rebuild_caches();
  return state;
}

Eigen::Index ChainOutput::param_index(const std::string& name) const {
  for (std::size_t i = 0; i < param_names.size(); ++i)
    if (param_names[i] == name) return static_cast<Eigen::Index>(i);
  throw PogampError("no such parameter in chain: " + name);
}

namespace {

RetainedDraw snapshot(const PogampState& state) {
  RetainedDraw d;
  d.sigma2 = state.kernel.sigma2;
  d.phi = state.kernel.phi;
  d.tau2 = state.kernel.tau2;
  d.alpha = state.f.alpha;
  d.nu = state.f.nu;
  d.lambda = state.intensity.lambda;
  d.intensity_a = state.intensity.a;
  d.intensity_b = state.intensity.b;
  d.intensity_c = state.intensity.c;
  d.n = state.n;
  d.y_n = state.y_n;
  return d;
}

}  // namespace

ChainOutput run_gibbs(Rng& rng, const LocationSet& obs_locs, const Vector& y_o,
                      const PogampModel& skeleton, const PriorSpec& priors,
                      const SampleFlags& flags, const McmcConfig& config,
                      const SweepObserver& observer) {
  config.validate();
  PogampState state = make_initial_state(obs_locs, y_o, skeleton, priors, flags);

  const int K = config.K > 0 ? config.K : choose_subregions(skeleton, priors);
  const PartitionGrid grid = PartitionGrid::regular(skeleton.domain, K);

  ChainOutput out;
  out.seed = rng.seed();
  out.iterations = config.iterations;
  out.burn_in = config.burn_in;
  out.thin = config.thin;
  out.K = K;
  out.M = config.M;
  out.initial_state = snapshot(state);

  std::vector<std::string> names;
  if (flags.sigma2) names.push_back("sigma2");
  if (flags.phi) names.push_back("phi");
  if (flags.tau2) names.push_back("tau2");
  if (flags.alpha) names.push_back("alpha");
  if (flags.nu) names.push_back("nu");
  if (flags.lambda && state.intensity.kind == IntensityKind::homogeneous)
    names.push_back("lambda");
  const bool trace_theta_lambda =
      flags.theta_lambda && state.intensity.kind == IntensityKind::parametric;
  if (trace_theta_lambda) {
    names.push_back("intensity_a");
    names.push_back("intensity_b");
    if (state.intensity.form == IntensityForm::linear) names.push_back("intensity_c");
  }
  out.param_names = names;

  const long n_retained =
      config.iterations <= config.burn_in
          ? 0
          : (config.iterations - config.burn_in + config.thin - 1) / config.thin;
  out.draws.resize(n_retained, static_cast<Eigen::Index>(names.size()));
  out.n_trace.reserve(static_cast<std::size_t>(n_retained));
  out.states.reserve(static_cast<std::size_t>(n_retained));

  ThetaScales scales;
  std::vector<double> theta_lambda_scales;
  BlockRates rates_at_burn_in;

  // window-averaged parameters feeding the Y_N proposal covariance
  FDist f_window = state.f;
  double win_sigma2 = 0.0, win_phi = 0.0, win_tau2 = 0.0, win_alpha = 0.0, win_nu = 0.0;
  long win_count = 0;
  AcceptCounter win_y_n;
  BlockRates win_theta;

  AdaptiveProposal proposal =
      build_proposal(f_window, state.n.events, 0.0, state.anchor_revision);

  long retained_row = 0;
  for (long iter = 1; iter <= config.iterations; ++iter) {
    for (int k = 0; k < K; ++k)
      update_n_block(rng, state, grid, k, config.exact_inverses, out.rates.n_block);

    if (!state.n.events.empty()) {
      if (proposal.built_at_revision != state.anchor_revision)
        proposal = build_proposal(f_window, state.n.events, proposal.log_scale,
                                  state.anchor_revision);
      const long before = out.rates.y_n.accepted;
      update_y_n(rng, state, proposal, out.rates.y_n);
      win_y_n.proposed += 1;
      win_y_n.accepted += out.rates.y_n.accepted - before;
    }

    if (state.intensity.kind == IntensityKind::homogeneous) {
      if (flags.lambda) update_lambda(rng, state, priors.lambda_prior);
    } else if (flags.theta_lambda) {
      update_theta_lambda(rng, state, priors.theta_lambda, theta_lambda_scales,
                          out.rates.theta_lambda);
    }

    {
      const BlockRates before = out.rates;
      update_theta(rng, state, priors, flags,
                   state.share_kernel ? ThetaMode::shared : ThetaMode::G, scales,
                   out.rates);
      if (!state.share_kernel)
        update_theta(rng, state, priors, flags, ThetaMode::f, scales, out.rates);
      win_theta.sigma2.proposed += out.rates.sigma2.proposed - before.sigma2.proposed;
      win_theta.sigma2.accepted += out.rates.sigma2.accepted - before.sigma2.accepted;
      win_theta.phi.proposed += out.rates.phi.proposed - before.phi.proposed;
      win_theta.phi.accepted += out.rates.phi.accepted - before.phi.accepted;
      win_theta.tau2.proposed += out.rates.tau2.proposed - before.tau2.proposed;
      win_theta.tau2.accepted += out.rates.tau2.accepted - before.tau2.accepted;
      win_theta.alpha.proposed += out.rates.alpha.proposed - before.alpha.proposed;
      win_theta.alpha.accepted += out.rates.alpha.accepted - before.alpha.accepted;
      win_theta.nu.proposed += out.rates.nu.proposed - before.nu.proposed;
      win_theta.nu.accepted += out.rates.nu.accepted - before.nu.accepted;
    }

    win_sigma2 += state.kernel.sigma2;
    win_phi += state.kernel.phi;
    win_tau2 += state.kernel.tau2;
    win_alpha += state.f.alpha;
    win_nu += state.f.nu;
    ++win_count;

    // adaptation: only during burn-in, exactly at multiples of M
    if (iter <= config.burn_in && iter % config.M == 0 && win_count > 0) {
      FDist f_avg = state.f;
      f_avg.alpha = win_alpha / static_cast<double>(win_count);
      f_avg.nu = std::max(2.0 + 1e-6, win_nu / static_cast<double>(win_count));
      CovKernel k_avg = state.kernel;
      k_avg.sigma2 = win_sigma2 / static_cast<double>(win_count);
      k_avg.phi = win_phi / static_cast<double>(win_count);
      k_avg.tau2 = win_tau2 / static_cast<double>(win_count);
      f_avg.scale_kernel = state.share_kernel ? k_avg : state.f.scale_kernel;
      f_window = f_avg;

      proposal = adapt_proposal(win_y_n.proposed > 0 ? win_y_n.rate() : proposal.target,
                                f_window, state.n.events, proposal,
                                state.anchor_revision);

      const auto tune = [](double& log_sd, const AcceptCounter& c) {
        if (c.proposed > 0) log_sd += c.rate() - 0.44;
      };
      tune(scales.sigma2, win_theta.sigma2);
      tune(scales.phi, win_theta.phi);
      tune(scales.tau2, win_theta.tau2);
      tune(scales.alpha, win_theta.alpha);
      tune(scales.nu, win_theta.nu);

      win_sigma2 = win_phi = win_tau2 = win_alpha = win_nu = 0.0;
      win_count = 0;
      win_y_n = AcceptCounter{};
      win_theta = BlockRates{};
    }

    if (iter == config.burn_in) rates_at_burn_in = out.rates;
    if (config.debug_checks) state.verify_caches(1e-7);
    if (observer) observer(state, iter);

    if (iter > config.burn_in && (iter - config.burn_in) % config.thin == 0) {
      Eigen::Index col = 0;
      auto put = [&](double v) { out.draws(retained_row, col++) = v; };
      if (flags.sigma2) put(state.kernel.sigma2);
      if (flags.phi) put(state.kernel.phi);
      if (flags.tau2) put(state.kernel.tau2);
      if (flags.alpha) put(state.f.alpha);
      if (flags.nu) put(state.f.nu);
      if (flags.lambda && state.intensity.kind == IntensityKind::homogeneous)
        put(state.intensity.lambda);
      if (trace_theta_lambda) {
        put(state.intensity.a);
        put(state.intensity.b);
        if (state.intensity.form == IntensityForm::linear) put(state.intensity.c);
      }
      out.n_trace.push_back(static_cast<long>(state.n.events.size()));
      out.states.push_back(snapshot(state));
      ++retained_row;
    }
  }
  const auto post = [](const AcceptCounter& total, const AcceptCounter& burn) {
    return AcceptCounter{total.accepted - burn.accepted, total.proposed - burn.proposed};
  };
  out.rates_post.y_n = post(out.rates.y_n, rates_at_burn_in.y_n);
  out.rates_post.n_block = post(out.rates.n_block, rates_at_burn_in.n_block);
  out.rates_post.sigma2 = post(out.rates.sigma2, rates_at_burn_in.sigma2);
  out.rates_post.phi = post(out.rates.phi, rates_at_burn_in.phi);
  out.rates_post.tau2 = post(out.rates.tau2, rates_at_burn_in.tau2);
  out.rates_post.alpha = post(out.rates.alpha, rates_at_burn_in.alpha);
  out.rates_post.nu = post(out.rates.nu, rates_at_burn_in.nu);
  out.rates_post.theta_lambda = post(out.rates.theta_lambda, rates_at_burn_in.theta_lambda);
  return out;
}

}  // namespace pogamp
