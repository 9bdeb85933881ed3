#include "pogamp/nngp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pogamp/parallel.hpp"

namespace pogamp {

namespace {

std::vector<int> nearest_among(const LocationSet& pool, const std::vector<int>& candidates,
                               const Site& s, int count) {
  std::vector<std::pair<double, int>> d;
  d.reserve(candidates.size());
  for (int i : candidates) d.emplace_back(distance(pool[static_cast<std::size_t>(i)], s), i);
  const auto keep = std::min<std::size_t>(static_cast<std::size_t>(count), d.size());
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(keep), d.end());
  std::vector<int> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(d[i].second);
  return out;
}

}  // namespace

NngpIndex build_index(const Domain& domain, int mesh_resolution, int m) {
  if (mesh_resolution < 2) throw ConfigError("mesh resolution must be >= 2 per axis");
  if (m < 1) throw ConfigError("neighbor count m must be >= 1");
  NngpIndex index;
  index.domain = domain;
  index.m = m;
  const int r = mesh_resolution;
  index.mesh.sites.reserve(static_cast<std::size_t>(r) * r);
  for (int row = 0; row < r; ++row) {
    const double y = domain.y_min + domain.height() * row / (r - 1);
    for (int col = 0; col < r; ++col) {
      const double x = domain.x_min + domain.width() * col / (r - 1);
      index.mesh.append(Site{x, y});
    }
  }
  const int total = r * r;
  index.neighbor_sets.resize(static_cast<std::size_t>(total));
  std::vector<int> predecessors;
  predecessors.reserve(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) {
    index.neighbor_sets[static_cast<std::size_t>(i)] =
        nearest_among(index.mesh, predecessors, index.mesh[static_cast<std::size_t>(i)], m);
    predecessors.push_back(i);
  }
  return index;
}

std::vector<int> NngpIndex::nearest_mesh(const Site& s, int count) const {
  std::vector<int> all(mesh.size());
  std::iota(all.begin(), all.end(), 0);
  return nearest_among(mesh, all, s, count);
}

namespace {

// conditional of one site given (selected mesh values) + (exact given set)
GaussianConditional term_conditional(const Site& target, const NngpIndex& index,
                                     const std::vector<int>& mesh_ids,
                                     const Vector& y_mesh, const LocationSet& given_locs,
                                     const Vector& given_vals, const CovKernel& kernel) {
  LocationSet cond_locs;
  cond_locs.sites.reserve(mesh_ids.size() + given_locs.size());
  Vector vals(static_cast<Eigen::Index>(mesh_ids.size() + given_locs.size()));
  Eigen::Index at = 0;
  for (int id : mesh_ids) {
    cond_locs.append(index.mesh[static_cast<std::size_t>(id)]);
    vals(at++) = y_mesh(id);
  }
  for (std::size_t i = 0; i < given_locs.size(); ++i) {
    cond_locs.append(given_locs[i]);
    vals(at++) = given_vals(static_cast<Eigen::Index>(i));
  }
  LocationSet t;
  t.append(target);
  if (cond_locs.empty()) return gp_marginal(t, kernel);
  const SpdChol chol = cholesky(cov_matrix(kernel, cond_locs));
  return gp_conditional(t, cond_locs, vals, kernel, chol);
}

}  // namespace

double nngp_logdensity(const Vector& y_mesh, const NngpIndex& index, const Vector& y_n,
                       const LocationSet& n_locs, const CovKernel& kernel) {
  if (y_mesh.size() != static_cast<Eigen::Index>(index.mesh.size()))
    throw PogampError("nngp_logdensity: mesh values and index disagree");
  double out = 0.0;
  for (std::size_t i = 0; i < index.mesh.size(); ++i) {
    const GaussianConditional c =
        term_conditional(index.mesh[i], index, index.neighbor_sets[i], y_mesh, n_locs,
                         y_n, kernel);
    const double v = c.cov(0, 0);
    const double z = y_mesh(static_cast<Eigen::Index>(i)) - c.mean(0);
    out += -0.5 * (std::log(2.0 * M_PI * v) + z * z / v);
  }
  return out;
}

Vector nngp_sample_mesh(Rng& rng, const NngpIndex& index, const LocationSet& given_locs,
                        const Vector& given_vals, const CovKernel& kernel) {
  Vector y_mesh(static_cast<Eigen::Index>(index.mesh.size()));
  for (std::size_t i = 0; i < index.mesh.size(); ++i) {
    const GaussianConditional c =
        term_conditional(index.mesh[i], index, index.neighbor_sets[i], y_mesh, given_locs,
                         given_vals, kernel);
    y_mesh(static_cast<Eigen::Index>(i)) =
        c.mean(0) + std::sqrt(std::max(c.cov(0, 0), 0.0)) * rng.normal();
  }
  return y_mesh;
}

Vector nngp_mesh_conditional_mean(const NngpIndex& index, const LocationSet& given_locs,
                                  const Vector& given_vals, const CovKernel& kernel) {
  Vector mean(static_cast<Eigen::Index>(index.mesh.size()));
  for (std::size_t i = 0; i < index.mesh.size(); ++i) {
    const GaussianConditional c = term_conditional(
        index.mesh[i], index, index.neighbor_sets[i], mean, given_locs, given_vals, kernel);
    mean(static_cast<Eigen::Index>(i)) = c.mean(0);
  }
  return mean;
}

GaussianConditional nngp_target_conditional(const Site& target, const NngpIndex& index,
                                            const Vector& y_n, const LocationSet& n_locs,
                                            const CovKernel& kernel,
                                            const Vector& y_mesh) {
  const std::vector<int> nbrs = index.nearest_mesh(target, index.m);
  return term_conditional(target, index, nbrs, y_mesh, n_locs, y_n, kernel);
}

Vector nngp_sample(const Rng& rng, const LocationSet& targets, const NngpIndex& index,
                   const Vector& y_n, const LocationSet& n_locs, const CovKernel& kernel,
                   const Vector& y_mesh, int threads) {
  Vector out(static_cast<Eigen::Index>(targets.size()));
  run_replicates(
      static_cast<long>(targets.size()),
      [&](long i) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(i));
        const GaussianConditional c = nngp_target_conditional(
            targets[static_cast<std::size_t>(i)], index, y_n, n_locs, kernel, y_mesh);
        out(i) = c.mean(0) + std::sqrt(std::max(c.cov(0, 0), 0.0)) * sub.normal();
      },
      threads);
  return out;
}

}  // namespace pogamp
