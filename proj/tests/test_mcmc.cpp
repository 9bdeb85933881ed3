#include <doctest.h>

#include <cmath>

#include "pogamp/diagnostics.hpp"
#include "pogamp/stats.hpp"
#include "support.hpp"

using namespace pogamp;

namespace {

PogampModel skeleton_gaussian(double lambda, const Domain& d = Domain::unit_square()) {
  PogampModel m;
  m.domain = d;
  m.kernel = CovKernel{KernelFamily::exponential, 1.0, 0.3, 0.0, 0.0};
  m.f.family = FFamily::skew_normal;
  m.f.alpha = 0.0;
  m.f.scale_kernel = m.kernel;
  m.intensity = Intensity::homogeneous_rate(lambda);
  return m;
}

PogampState state_with_anchors(const PogampModel& skeleton, const PriorSpec& priors,
                               const SampleFlags& flags, int n_anchors, Rng& rng) {
  LocationSet obs;
  Vector y;
  testing::make_gp_data(rng, skeleton.domain, skeleton.kernel, 8, 0.02, &obs, &y);
  PogampState st = make_initial_state(obs, y, skeleton, priors, flags);
  if (n_anchors > 0) {
    LocationSet anchors;
    for (int i = 0; i < n_anchors; ++i)
      anchors.append(Site{rng.uniform(skeleton.domain.x_min, skeleton.domain.x_max),
                          rng.uniform(skeleton.domain.y_min, skeleton.domain.y_max)});
    st.n.events = anchors;
    st.y_n = Vector::Zero(n_anchors);
    for (int i = 0; i < n_anchors; ++i) st.y_n(i) = rng.normal();
    st.rebuild_caches();
  }
  return st;
}

}  // namespace

TEST_CASE("conjugate lambda block samples its stated full conditional") {
  // prior Gamma(2,1), |N| = 5, mu(S) = 100 -> Gamma(7, 101)
  const Domain d = Domain::square(10.0);
  PogampModel skel = skeleton_gaussian(1.0, d);
  PriorSpec priors;
  priors.lambda_prior = GammaPrior{2.0, 1.0};
  SampleFlags flags;
  Rng rng(3);
  PogampState st = state_with_anchors(skel, priors, flags, 5, rng);

  std::vector<double> draws(20000);
  for (auto& v : draws) {
    update_lambda(rng, st, priors.lambda_prior);
    v = st.intensity.lambda;
  }
  const auto ks = ks_1sample(draws, [](double v) { return gamma_cdf(v, 7.0, 101.0); });
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("conjugate lambda with an empty pattern uses only the prior and the area") {
  const Domain d = Domain::square(2.0);
  PogampModel skel = skeleton_gaussian(1.0, d);
  PriorSpec priors;
  priors.lambda_prior = GammaPrior{3.0, 2.0};
  SampleFlags flags;
  Rng rng(5);
  PogampState st = state_with_anchors(skel, priors, flags, 0, rng);
  std::vector<double> draws(20000);
  for (auto& v : draws) {
    update_lambda(rng, st, priors.lambda_prior);
    v = st.intensity.lambda;
  }
  const auto ks = ks_1sample(draws, [](double v) { return gamma_cdf(v, 3.0, 6.0); });
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("zero-magnitude proposals are always accepted") {
  PogampModel skel = skeleton_gaussian(1.0);
  PriorSpec priors;
  SampleFlags flags;
  Rng rng(7);
  PogampState st = state_with_anchors(skel, priors, flags, 6, rng);

  // Y_N block with a vanishing step
  AdaptiveProposal prop = build_proposal(st.f, st.n.events, -1e9, st.anchor_revision);
  AcceptCounter c;
  for (int i = 0; i < 50; ++i) update_y_n(rng, st, prop, c);
  CHECK(c.proposed == 50);
  CHECK(c.accepted == 50);

  // theta blocks with vanishing steps
  ThetaScales scales;
  scales.sigma2 = scales.phi = scales.tau2 = scales.alpha = scales.nu = -1e9;
  BlockRates rates;
  for (int i = 0; i < 20; ++i)
    update_theta(rng, st, priors, flags, ThetaMode::shared, scales, rates);
  CHECK(rates.sigma2.accepted == rates.sigma2.proposed);
  CHECK(rates.phi.accepted == rates.phi.proposed);
}

TEST_CASE("N block under the gaussian limit accepts everything and recovers the prior") {
  PogampModel skel = skeleton_gaussian(3.0);
  PriorSpec priors;
  SampleFlags flags;
  flags.lambda = false;  // keep the skeleton rate
  Rng rng(11);
  PogampState st = state_with_anchors(skel, priors, flags, 0, rng);
  const PartitionGrid grid = PartitionGrid::regular(skel.domain, 4);

  AcceptCounter counter;
  std::vector<long> counts;
  for (int sweep = 0; sweep < 10000; ++sweep) {
    for (int k = 0; k < 4; ++k) {
      update_n_block(rng, st, grid, k, false, counter);
      CHECK(st.unveiled.empty());  // retrospective discard after every block
    }
    counts.push_back(static_cast<long>(st.n.events.size()));
  }
  // with f = g the ratio is identically 1
  CHECK(counter.accepted == counter.proposed);
  // long-run |N| matches the Poisson prior
  CHECK(chi2_poisson_gof_pvalue(counts, 3.0) > 0.01);
}

TEST_CASE("matrix-reuse path equals the full re-inversion path under a shared seed") {
  PogampModel skel = skeleton_gaussian(2.0);
  skel.f.alpha = 2.0;  // non-trivial f so the ratio actually bites
  skel.f.family = FFamily::skew_t;
  skel.f.nu = 6.0;
  skel.f.scale_kernel = skel.kernel;
  PriorSpec priors;
  SampleFlags flags;
  flags.alpha = true;

  LocationSet obs;
  Vector y;
  Rng data_rng(13);
  testing::make_gp_data(data_rng, skel.domain, skel.kernel, 10, 0.02, &obs, &y);

  McmcConfig cfg;
  cfg.iterations = 300;
  cfg.burn_in = 100;
  cfg.thin = 1;
  cfg.K = 4;
  cfg.M = 50;

  McmcConfig cfg_exact = cfg;
  cfg_exact.exact_inverses = true;

  Rng rng1(17), rng2(17);
  const ChainOutput a = run_gibbs(rng1, obs, y, skel, priors, flags, cfg);
  const ChainOutput b = run_gibbs(rng2, obs, y, skel, priors, flags, cfg_exact);

  REQUIRE(a.draws.rows() == b.draws.rows());
  CHECK((a.draws - b.draws).cwiseAbs().maxCoeff() < 1e-7);
  for (std::size_t i = 0; i < a.n_trace.size(); ++i) CHECK(a.n_trace[i] == b.n_trace[i]);
}

TEST_CASE("debug cache checks pass over a full run") {
  PogampModel skel = skeleton_gaussian(2.0);
  PriorSpec priors;
  SampleFlags flags;
  LocationSet obs;
  Vector y;
  Rng data_rng(19);
  testing::make_gp_data(data_rng, skel.domain, skel.kernel, 6, 0.02, &obs, &y);
  McmcConfig cfg;
  cfg.iterations = 120;
  cfg.burn_in = 40;
  cfg.K = 1;
  cfg.M = 30;
  cfg.debug_checks = true;
  Rng rng(23);
  CHECK_NOTHROW(run_gibbs(rng, obs, y, skel, priors, flags, cfg));
}

TEST_CASE("zero iterations echo the initial state") {
  PogampModel skel = skeleton_gaussian(1.0);
  PriorSpec priors;
  SampleFlags flags;
  LocationSet obs;
  Vector y;
  Rng data_rng(29);
  testing::make_gp_data(data_rng, skel.domain, skel.kernel, 5, 0.02, &obs, &y);
  McmcConfig cfg;
  cfg.iterations = 0;
  cfg.burn_in = 0;
  Rng rng(31);
  const ChainOutput out = run_gibbs(rng, obs, y, skel, priors, flags, cfg);
  CHECK(out.draws.rows() == 0);
  CHECK(out.states.empty());
  CHECK(out.initial_state.lambda == priors.lambda_prior.mean());
  CHECK(out.initial_state.n.size() == 0);
}

TEST_CASE("lambda prior is recovered on a data-free subchain") {
  // with f = g the (N, lambda) subchain is a Gibbs sampler on its own prior
  PogampModel skel = skeleton_gaussian(2.0);
  PriorSpec priors;
  priors.lambda_prior = GammaPrior{4.0, 2.0};
  SampleFlags flags;
  flags.sigma2 = flags.phi = false;  // hold theta fixed
  LocationSet obs;
  Vector y;
  Rng data_rng(37);
  testing::make_gp_data(data_rng, skel.domain, skel.kernel, 5, 0.02, &obs, &y);
  McmcConfig cfg;
  cfg.iterations = 30000;
  cfg.burn_in = 2000;
  cfg.thin = 5;
  cfg.K = 1;
  Rng rng(41);
  const ChainOutput out = run_gibbs(rng, obs, y, skel, priors, flags, cfg);
  const Eigen::Index col = out.param_index("lambda");
  std::vector<double> lam(static_cast<std::size_t>(out.draws.rows()));
  for (Eigen::Index i = 0; i < out.draws.rows(); ++i)
    lam[static_cast<std::size_t>(i)] = out.draws(i, col);
  // Gamma(4,2): mean 2, sd 1
  CHECK(mean(lam) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(sd(lam) == doctest::Approx(1.0).epsilon(0.10));
}

TEST_CASE("full sampler matches the brute-force GP-only oracle under the gaussian limit") {
  const Domain d = Domain::unit_square();
  CovKernel truth{KernelFamily::exponential, 1.2, 0.25, 0.0, 0.0};
  LocationSet obs;
  Vector y;
  Rng data_rng(43);
  testing::make_gp_data(data_rng, d, truth, 10, 0.03, &obs, &y);

  PogampModel skel = skeleton_gaussian(1.0, d);
  PriorSpec priors;  // lognormal(0,1) on sigma2, phi
  SampleFlags flags;
  flags.lambda = false;  // lambda fixed per the oracle example
  McmcConfig cfg;
  cfg.iterations = 24000;
  cfg.burn_in = 4000;
  cfg.thin = 10;
  cfg.K = 1;
  cfg.M = 500;
  Rng rng(47);
  const ChainOutput out = run_gibbs(rng, obs, y, skel, priors, flags, cfg);

  Rng orng(53);
  const testing::GpOracleDraws oracle = testing::gp_only_sampler(
      orng, obs, y, 0.0, KernelFamily::exponential, 0.0, LogNormalPrior{0.0, 1.0},
      LogNormalPrior{0.0, 1.0}, 60000, 10000, 25);

  std::vector<double> s2(out.retained()), phi(out.retained());
  for (std::size_t i = 0; i < out.retained(); ++i) {
    s2[i] = out.draws(static_cast<Eigen::Index>(i), out.param_index("sigma2"));
    phi[i] = out.draws(static_cast<Eigen::Index>(i), out.param_index("phi"));
  }
  CHECK(ks_2sample(s2, oracle.sigma2).p_value > 0.01);
  CHECK(ks_2sample(phi, oracle.phi).p_value > 0.01);
}

TEST_CASE("theta_lambda MH matches the conjugate posterior for a constant intensity") {
  // parametric lambda(s) = a with a Gamma prior: the full conditional of a is
  // Gamma(shape + |N|, rate + mu(S)); the MH chain must reproduce it
  const Domain d = Domain::square(10.0);
  PogampModel skel = skeleton_gaussian(1.0, d);
  skel.intensity.kind = IntensityKind::parametric;
  skel.intensity.form = IntensityForm::linear;
  skel.intensity.a = 0.05;
  skel.intensity.b = 0.0;
  skel.intensity.c = 0.0;
  skel.intensity.lambda_bar = 0.05;

  PriorSpec priors;
  ParamPrior gamma_prior;
  gamma_prior.kind = ParamPrior::Kind::gamma;
  gamma_prior.gamma = GammaPrior{2.0, 1.0};
  priors.theta_lambda = gamma_prior;

  SampleFlags flags;
  Rng rng(59);
  PogampState st = state_with_anchors(skel, priors, flags, 5, rng);

  std::vector<double> log_sd{-1.0, -1.0, -1.0};
  AcceptCounter counter;
  std::vector<double> draws;
  for (int i = 0; i < 60000; ++i) {
    update_theta_lambda(rng, st, priors.theta_lambda, log_sd, counter);
    if (i % 10 == 0) draws.push_back(st.intensity.a);
  }
  const auto ks = ks_1sample(draws, [](double v) { return gamma_cdf(v, 7.0, 101.0); });
  CHECK(ks.p_value > 0.01);
  // zero components must stay out of the model
  CHECK(st.intensity.b == 0.0);
  CHECK(st.intensity.c == 0.0);
}

TEST_CASE("adapt_proposal formulas") {
  PogampModel skel = skeleton_gaussian(1.0);
  LocationSet anchors{{Site{0.2, 0.2}, Site{0.5, 0.5}, Site{0.8, 0.3}}};
  AdaptiveProposal p = build_proposal(skel.f, anchors, 0.3, 1);
  CHECK(p.dim == 3);
  CHECK(p.target == 0.44);  // dimension <= 5 targets the scalar optimum

  const AdaptiveProposal same = adapt_proposal(p.target, skel.f, anchors, p, 1);
  CHECK(same.log_scale == doctest::Approx(0.3));

  const AdaptiveProposal up = adapt_proposal(1.0, skel.f, anchors, p, 1);
  CHECK(std::exp(up.log_scale - p.log_scale) == doctest::Approx(std::exp(1.0 - 0.44)));

  LocationSet big;
  Rng rng(61);
  for (int i = 0; i < 8; ++i) big.append(Site{rng.uniform(), rng.uniform()});
  const AdaptiveProposal high = build_proposal(skel.f, big, 0.0, 2);
  CHECK(high.target == doctest::Approx(0.234));
  // base_cov is the f covariance at the anchors
  CHECK((high.base_cov - fdist_cov(skel.f, big)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("K heuristic: smallest perfect square with <= 5 expected events per tile") {
  PogampModel skel = skeleton_gaussian(1.0);
  PriorSpec priors;
  priors.lambda_prior = GammaPrior{2.0, 1.0};  // mean 2 on a unit square
  CHECK(choose_subregions(skel, priors) == 1);
  priors.lambda_prior = GammaPrior{45.0, 1.0};  // mean 45 -> k = 3
  CHECK(choose_subregions(skel, priors) == 9);
  PogampModel big = skeleton_gaussian(1.0, Domain::square(10.0));
  priors.lambda_prior = GammaPrior{2.0, 1.0};  // 200 expected -> k = 7
  CHECK(choose_subregions(big, priors) == 49);
}

TEST_CASE("PC prior machinery") {
  // gaussian sanity family: KLD(N(0,s2) || N(0,1)) = (s2 - 1 - log s2)/2
  for (double s2 : {0.5, 1.5, 3.0}) {
    const F1d a{FFamily::skew_normal, 0.0, 10.0, 0.0, s2, false};
    const F1d b{FFamily::skew_normal, 0.0, 10.0, 0.0, 1.0, false};
    CHECK(kld_1d(a, b) ==
          doctest::Approx(0.5 * (s2 - 1.0 - std::log(s2))).epsilon(1e-6));
  }

  FDist sn;
  sn.family = FFamily::skew_normal;
  sn.scale_kernel = CovKernel{KernelFamily::exponential, 1.0, 1.0, 0.0, 0.0};

  // KLD by quadrature matches a large Monte Carlo evaluation
  {
    FDist f_a = sn;
    f_a.alpha = 2.0;
    const F1d fa = f_marginal_1d(f_a, 0.0, 1.0);
    const F1d fb = f_marginal_1d(sn, 0.0, 1.0);  // alpha = 0
    const double quad = kld_1d(fa, fb);

    Rng rng(67);
    const long n = 1000000;
    std::vector<double> terms(static_cast<std::size_t>(n));
    LocationSet one{{Site{0.5, 0.5}}};
    PreparedF pf(f_a, one);
    for (auto& t : terms) {
      const double x = pf.sample(rng)(0);
      t = fa.logpdf(x) - fb.logpdf(x);
    }
    const double mc = mean(terms);
    const double se = std::sqrt(variance(terms) / n);
    CHECK(std::abs(quad - mc) < 3.0 * se);
  }

  // boundary at xi = xi0 is flagged and finite
  const PcResult at0 = pc_prior_logdensity(sn, 1.0, 1.0, 2.0);
  CHECK(at0.boundary);
  CHECK(at0.distance == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(std::isfinite(at0.logdensity));

  // away from the base value: d > 0, density = log zeta - zeta d + log|d'|
  const PcResult away = pc_prior_logdensity(sn, 0.2, 3.0, 2.0);
  CHECK(!away.boundary);
  CHECK(away.distance > 0.0);
  CHECK(away.logdensity ==
        doctest::Approx(std::log(2.0) - 2.0 * away.distance +
                        std::log(std::abs(away.deriv)))
            .epsilon(1e-12));
}

TEST_CASE("diagnostics: ESS and split-Rhat behave sensibly") {
  Rng rng(71);
  std::vector<double> iid(4000);
  for (auto& v : iid) v = rng.normal();
  const double ess_iid = effective_sample_size(iid);
  CHECK(ess_iid > 2500.0);

  std::vector<double> ar(4000);
  double x = 0.0;
  for (auto& v : ar) {
    x = 0.9 * x + std::sqrt(1.0 - 0.81) * rng.normal();
    v = x;
  }
  CHECK(effective_sample_size(ar) < 0.25 * effective_sample_size(iid));

  std::vector<double> shifted(4000);
  for (auto& v : shifted) v = rng.normal() + 1.5;
  CHECK(split_rhat({iid, shifted}) > 1.2);
  std::vector<double> same(4000);
  for (auto& v : same) v = rng.normal();
  CHECK(split_rhat({iid, same}) < 1.02);
}
