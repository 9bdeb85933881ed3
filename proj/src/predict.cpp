#include "pogamp/predict.hpp"

#include <cmath>

#include "pogamp/parallel.hpp"
#include "pogamp/stats.hpp"

namespace pogamp {

Integrand integrand_from_string(const std::string& name) {
  if (name == "identity") return Integrand::identity;
  if (name == "indicator_above") return Integrand::indicator_above;
  if (name == "square") return Integrand::square;
  throw ConfigError("unknown integrand: " + name);
}

double apply_integrand(Integrand g, double threshold, double y) {
  switch (g) {
    case Integrand::identity: return y;
    case Integrand::indicator_above: return y > threshold ? 1.0 : 0.0;
    case Integrand::square: return y * y;
  }
  return 0.0;
}

CovKernel kernel_from_draw(const PogampModel& skeleton, const RetainedDraw& d) {
  CovKernel k = skeleton.kernel;
  k.sigma2 = d.sigma2;
  k.phi = d.phi;
  k.tau2 = d.tau2;
  return k;
}

Matrix predictive_samples(const Rng& rng, const ChainOutput& chain, const LocationSet& obs_locs,
                          const Vector& y_o, const PogampModel& skeleton,
                          const LocationSet& sites, const NngpSettings& nngp,
                          int threads) {
  if (chain.states.empty()) throw ConfigError("predictive_samples needs a non-empty chain");
  const long draws = static_cast<long>(chain.states.size());
  Matrix out(draws, static_cast<Eigen::Index>(sites.size()));

  NngpIndex index;
  if (nngp.enabled) index = build_index(skeleton.domain, nngp.mesh_resolution, nngp.m);

  run_replicates(
      draws,
      [&](long j) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(j));
        const RetainedDraw& d = chain.states[static_cast<std::size_t>(j)];
        const CovKernel kernel = kernel_from_draw(skeleton, d);
        const LocationSet given = LocationSet::concat(d.n.events, obs_locs);
        Vector vals(given.size());
        vals.head(d.y_n.size()) = d.y_n;
        vals.tail(y_o.size()) = y_o;
        if (!nngp.enabled) {
          const SpdChol chol = cholesky(cov_matrix(kernel, given));
          const GaussianConditional c = gp_conditional(sites, given, vals, kernel, chol);
          out.row(j) = mvn_sample(sub, c.mean, c.cov).transpose();
        } else {
          const Vector y_mesh = nngp_sample_mesh(sub, index, given, vals, kernel);
          for (std::size_t s = 0; s < sites.size(); ++s) {
            const GaussianConditional c = nngp_target_conditional(
                sites[s], index, d.y_n, d.n.events, kernel, y_mesh);
            out(j, static_cast<Eigen::Index>(s)) =
                c.mean(0) + std::sqrt(std::max(c.cov(0, 0), 0.0)) * sub.normal();
          }
        }
      },
      threads);
  return out;
}

McEstimate functional_estimate(const Rng& rng, const ChainOutput& chain,
                               const LocationSet& obs_locs, const Vector& y_o,
                               const PogampModel& skeleton, const PredictiveRequest& req,
                               const NngpSettings& nngp, int threads) {
  if (req.kind != PredictiveRequest::Kind::integral)
    throw ConfigError("functional_estimate needs an integral request");
  if (chain.states.empty()) throw ConfigError("functional_estimate needs a non-empty chain");
  if (req.points_per_draw < 1 || req.strata < 1)
    throw ConfigError("strata and points_per_draw must be >= 1");

  const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(req.strata))));
  if (k * k != req.strata) throw InvalidPartition("strata must be a perfect square");
  const std::vector<Domain> tiles = partition_domain(skeleton.domain, k, k);

  NngpIndex index;
  if (nngp.enabled) index = build_index(skeleton.domain, nngp.mesh_resolution, nngp.m);

  const long draws = static_cast<long>(chain.states.size());
  std::vector<double> h(static_cast<std::size_t>(draws), 0.0);

  run_replicates(
      draws,
      [&](long j) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(j));
        const RetainedDraw& d = chain.states[static_cast<std::size_t>(j)];
        const CovKernel kernel = kernel_from_draw(skeleton, d);
        const LocationSet given = LocationSet::concat(d.n.events, obs_locs);
        Vector vals(given.size());
        vals.head(d.y_n.size()) = d.y_n;
        vals.tail(y_o.size()) = y_o;

        std::optional<SpdChol> chol;
        Vector y_mesh;
        if (!nngp.enabled)
          chol = cholesky(cov_matrix(kernel, given));
        else
          y_mesh = nngp_sample_mesh(sub, index, given, vals, kernel);

        double total = 0.0;
        for (const Domain& tile : tiles) {
          double acc = 0.0;
          for (int p = 0; p < req.points_per_draw; ++p) {
            const Site u{sub.uniform(tile.x_min, tile.x_max),
                         sub.uniform(tile.y_min, tile.y_max)};
            LocationSet t;
            t.append(u);
            double y;
            if (!nngp.enabled) {
              const GaussianConditional c = gp_conditional(t, given, vals, kernel, *chol);
              y = c.mean(0) + std::sqrt(std::max(c.cov(0, 0), 0.0)) * sub.normal();
            } else {
              const GaussianConditional c =
                  nngp_target_conditional(u, index, d.y_n, d.n.events, kernel, y_mesh);
              y = c.mean(0) + std::sqrt(std::max(c.cov(0, 0), 0.0)) * sub.normal();
            }
            acc += apply_integrand(req.g, req.threshold, y);
          }
          total += tile.area() * acc / static_cast<double>(req.points_per_draw);
        }
        h[static_cast<std::size_t>(j)] = total;
      },
      threads);

  McEstimate e;
  e.draws = draws;
  e.value = mean(h);
  e.se = draws > 1 ? std::sqrt(variance(h) / static_cast<double>(draws)) : 0.0;
  return e;
}

}  // namespace pogamp
