#ifndef POGAMP_LINALG_HPP
#define POGAMP_LINALG_HPP

#include <vector>

#include "pogamp/kernel.hpp"

namespace pogamp {

// Lower-triangular Cholesky factor of an SPD matrix, with the diagonal jitter
// that was needed to factor it. log_det refers to the factored matrix.
struct SpdChol {
  Matrix lower;
  double jitter = 0.0;
  double log_det = 0.0;

  Eigen::Index dim() const { return lower.rows(); }
  Vector solve(const Vector& b) const;
  Matrix solve_matrix(const Matrix& b) const;
  Matrix inverse() const;
  // lower * z for z ~ N(0, I), i.e. a N(0, Sigma) draw driver
  Vector apply_factor(const Vector& z) const;
};

// Factors a + jitter*I. Jitter starts at 1e-10*mean(diag) and escalates x100
// up to 1e-6*mean(diag); throws NotPositiveDefinite past that.
SpdChol cholesky(const Matrix& a);

// Covariance-matrix inverse tied to the location set that produced it.
struct InverseCache {
  LocationSet locations;
  Matrix inv;
  double logdet = 0.0;  // log det of the covariance matrix itself

  Eigen::Index dim() const { return inv.rows(); }
  static InverseCache empty() { return InverseCache{LocationSet{}, Matrix(0, 0), 0.0}; }
};

InverseCache make_inverse_cache(const LocationSet& locs, const CovKernel& kernel);

// Extends the cached inverse to the union with `new_locs` *prepended*, via
// the Schur complement Upsilon = (A - B Sigma^-1 B^T)^-1. Cost O(k^3 + k n^2).
InverseCache inverse_add(const InverseCache& cache, const LocationSet& new_locs,
                         const CovKernel& kernel);

// Shrinks the cached inverse after dropping the given locations, using
// A^-1 = a - b d^-1 c on the (logically) permuted inverse.
InverseCache inverse_remove(const InverseCache& cache, const std::vector<int>& drop_indices);

}  // namespace pogamp

#endif
