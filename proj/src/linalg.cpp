#include "pogamp/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace pogamp {

Vector SpdChol::solve(const Vector& b) const {
  Vector y = lower.triangularView<Eigen::Lower>().solve(b);
  return lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix SpdChol::solve_matrix(const Matrix& b) const {
  Matrix y = lower.triangularView<Eigen::Lower>().solve(b);
  return lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix SpdChol::inverse() const {
  return solve_matrix(Matrix::Identity(lower.rows(), lower.cols()));
}

Vector SpdChol::apply_factor(const Vector& z) const {
  return lower.triangularView<Eigen::Lower>() * z;
}

SpdChol cholesky(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw NotPositiveDefinite("cholesky: matrix must be square and non-empty");
  const Eigen::Index n = a.rows();
  const double mean_diag = a.diagonal().mean();
  const double max_jitter = 1e-6 * mean_diag;
  // clean attempt first, then the escalation ladder 1e-10 -> 1e-8 -> 1e-6
  double jitter = 0.0;
  for (;;) {
    Matrix m = a;
    if (jitter > 0.0) m.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() == Eigen::Success) {
      SpdChol out;
      out.lower = llt.matrixL();
      out.jitter = jitter;
      out.log_det = 2.0 * out.lower.diagonal().array().log().sum();
      return out;
    }
    if (jitter >= max_jitter)
      throw NotPositiveDefinite("cholesky failed after max jitter (dim " +
                                std::to_string(n) + ")");
    jitter = jitter == 0.0 ? 1e-10 * mean_diag : std::min(jitter * 100.0, max_jitter);
    if (!(jitter > 0.0))
      throw NotPositiveDefinite("cholesky: non-positive diagonal scale");
  }
}

InverseCache make_inverse_cache(const LocationSet& locs, const CovKernel& kernel) {
  if (locs.empty()) return InverseCache::empty();
  const SpdChol chol = cholesky(cov_matrix(kernel, locs));
  return InverseCache{locs, chol.inverse(), chol.log_det};
}

InverseCache inverse_add(const InverseCache& cache, const LocationSet& new_locs,
                         const CovKernel& kernel) {
  const auto k = static_cast<Eigen::Index>(new_locs.size());
  if (k < 1) throw PogampError("inverse_add: need at least one new location");
  if (cache.dim() == 0) return make_inverse_cache(new_locs, kernel);

  const Eigen::Index n = cache.dim();
  const Matrix a = cov_matrix(kernel, new_locs);
  const Matrix b = cross_cov(kernel, new_locs, cache.locations);

  const Matrix b_sinv = b * cache.inv;                       // k x n
  const Matrix schur = a - b_sinv * b.transpose();           // conditional covariance
  SpdChol schur_chol;
  try {
    schur_chol = cholesky(schur);
  } catch (const NotPositiveDefinite&) {
    throw NotPositiveDefinite("inverse_add: Schur complement not positive definite");
  }
  const Matrix upsilon = schur_chol.inverse();

  InverseCache out;
  out.locations = LocationSet::concat(new_locs, cache.locations);
  out.inv.resize(n + k, n + k);
  out.inv.topLeftCorner(k, k) = upsilon;
  const Matrix cross = -upsilon * b_sinv;                    // k x n
  out.inv.topRightCorner(k, n) = cross;
  out.inv.bottomLeftCorner(n, k) = cross.transpose();
  out.inv.bottomRightCorner(n, n) = cache.inv + b_sinv.transpose() * upsilon * b_sinv;
  out.logdet = cache.logdet + schur_chol.log_det;
  return out;
}

InverseCache inverse_remove(const InverseCache& cache, const std::vector<int>& drop_indices) {
  if (drop_indices.empty()) return cache;
  const Eigen::Index n = cache.dim();
  std::vector<char> dropped(static_cast<std::size_t>(n), 0);
  for (int i : drop_indices) {
    if (i < 0 || i >= n) throw PogampError("inverse_remove: index out of range");
    if (dropped[static_cast<std::size_t>(i)])
      throw PogampError("inverse_remove: duplicate index");
    dropped[static_cast<std::size_t>(i)] = 1;
  }
  const auto k = static_cast<Eigen::Index>(drop_indices.size());
  if (k == n) throw PogampError("inverse_remove: at least one location must remain");

  std::vector<int> keep;
  keep.reserve(static_cast<std::size_t>(n - k));
  for (Eigen::Index i = 0; i < n; ++i)
    if (!dropped[static_cast<std::size_t>(i)]) keep.push_back(static_cast<int>(i));

  // logical permutation: gather the blocks of the inverse by index
  const Eigen::Index m = n - k;
  Matrix a(m, m), b(m, k), d(k, k);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j)
      a(i, j) = cache.inv(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]);
    for (Eigen::Index j = 0; j < k; ++j)
      b(i, j) = cache.inv(keep[static_cast<std::size_t>(i)],
                          drop_indices[static_cast<std::size_t>(j)]);
  }
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      d(i, j) = cache.inv(drop_indices[static_cast<std::size_t>(i)],
                          drop_indices[static_cast<std::size_t>(j)]);

  const SpdChol d_chol = cholesky(d);
  InverseCache out;
  out.locations = cache.locations.subset(keep);
  out.inv = a - b * d_chol.solve_matrix(b.transpose());
  out.logdet = cache.logdet + d_chol.log_det;
  return out;
}

}  // namespace pogamp
