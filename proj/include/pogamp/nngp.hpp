#ifndef POGAMP_NNGP_HPP
#define POGAMP_NNGP_HPP

#include "pogamp/gaussian.hpp"

namespace pogamp {

// Reference mesh and nearest-neighbor sets. Mesh sites are ordered row-major;
// the sequential factorization (and hence the NNGP density) depends on this
// ordering.
struct NngpIndex {
  Domain domain;
  LocationSet mesh;  // regular grid, row-major
  int m = 15;
  std::vector<std::vector<int>> neighbor_sets;  // nearest predecessors per mesh site

  // the `count` nearest mesh sites to an arbitrary site
  std::vector<int> nearest_mesh(const Site& s, int count) const;
};

NngpIndex build_index(const Domain& domain, int mesh_resolution, int m);

// Log density of the mesh values under the factorized parent-process
// conditional: each 1-D term conditions on its neighbor set plus S_N exactly.
double nngp_logdensity(const Vector& y_mesh, const NngpIndex& index, const Vector& y_n,
                       const LocationSet& n_locs, const CovKernel& kernel);

// Sequential mesh sampler. Every term conditions on its nearest-predecessor
// mesh values plus the exact `given` set (the anchors; prediction appends the
// observations as well).
Vector nngp_sample_mesh(Rng& rng, const NngpIndex& index, const LocationSet& given_locs,
                        const Vector& given_vals, const CovKernel& kernel);

// Off-mesh targets, conditionally independent given the mesh: each target
// conditions on its m nearest mesh sites plus S_N. Cost O((|N|+m)^3) per
// site, independent of the mesh size.
Vector nngp_sample(const Rng& rng, const LocationSet& targets, const NngpIndex& index,
                   const Vector& y_n, const LocationSet& n_locs, const CovKernel& kernel,
                   const Vector& y_mesh, int threads = 0);

// 1-D conditional law of one target under the same truncated conditioning.
GaussianConditional nngp_target_conditional(const Site& target, const NngpIndex& index,
                                            const Vector& y_n, const LocationSet& n_locs,
                                            const CovKernel& kernel, const Vector& y_mesh);

// Mean of the factorized mesh law given the exact set: the forward recursion
// with every term replaced by its conditional mean (the network is linear
// Gaussian, so this equals E[Y_mesh] with no Monte Carlo noise).
Vector nngp_mesh_conditional_mean(const NngpIndex& index, const LocationSet& given_locs,
                                  const Vector& given_vals, const CovKernel& kernel);

}  // namespace pogamp

#endif
