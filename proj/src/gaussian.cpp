#include "pogamp/gaussian.hpp"

#include <cmath>

namespace pogamp {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

double mvn_logdensity(const Vector& y, const Vector& mean, const SpdChol& chol) {
  const Eigen::Index k = y.size();
  const Vector z = chol.lower.triangularView<Eigen::Lower>().solve(y - mean);
  return -0.5 * (static_cast<double>(k) * kLog2Pi + chol.log_det + z.squaredNorm());
}

double mvn_logdensity(const Vector& y, const Vector& mean, const Matrix& cov) {
  if (y.size() != mean.size() || cov.rows() != y.size())
    throw PogampError("mvn_logdensity: dimension mismatch");
  return mvn_logdensity(y, mean, cholesky(cov));
}

double mvn_logdensity_prec(const Vector& y, const Vector& mean, const Matrix& inv,
                           double logdet_cov) {
  const Eigen::Index k = y.size();
  if (k == 0) return 0.0;
  const Vector d = y - mean;
  const double quad = d.dot(inv * d);
  return -0.5 * (static_cast<double>(k) * kLog2Pi + logdet_cov + quad);
}

Vector mvn_sample(Rng& rng, const Vector& mean, const SpdChol& chol) {
  Vector z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mean + chol.apply_factor(z);
}

Vector mvn_sample(Rng& rng, const Vector& mean, const Matrix& cov) {
  // LDLT with clamped pivots: conditional covariances can be exactly singular
  // (interpolation at an observed site) and must still be sampleable
  Eigen::LDLT<Matrix> ldlt(cov);
  Vector z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  const Vector d = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
  Vector w = ldlt.matrixL() * d.cwiseProduct(z);
  return mean + (ldlt.transpositionsP().transpose() * w);
}

namespace {

GaussianConditional conditional_impl(const LocationSet& target, const LocationSet& given,
                                     const Vector& y_given, const CovKernel& kernel,
                                     const Matrix* inv, const SpdChol* chol) {
  const auto t = static_cast<Eigen::Index>(target.size());
  const Vector mu_t = Vector::Constant(t, kernel.mean);
  if (given.empty())
    return GaussianConditional{mu_t, cov_matrix(kernel, target)};
  if (static_cast<Eigen::Index>(given.size()) != y_given.size())
    throw PogampError("gp_conditional: given values and locations disagree");

  const Matrix sigma_tg = cross_cov(kernel, target, given);
  const Vector centered = y_given - Vector::Constant(y_given.size(), kernel.mean);
  Matrix w;  // t x n, sigma_tg * Sigma_g^{-1}
  if (inv != nullptr)
    w = sigma_tg * (*inv);
  else
    w = chol->solve_matrix(sigma_tg.transpose()).transpose();

  GaussianConditional out;
  out.mean = mu_t + w * centered;
  out.cov = cov_matrix(kernel, target) - w * sigma_tg.transpose();
  // symmetrize away roundoff
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

}  // namespace

GaussianConditional gp_conditional(const LocationSet& target, const LocationSet& given,
                                   const Vector& y_given, const CovKernel& kernel,
                                   const InverseCache& given_inv) {
  if (static_cast<std::size_t>(given_inv.dim()) != given.size())
    throw PogampError("gp_conditional: cache does not match the given set");
  if (given.empty()) return gp_marginal(target, kernel);
  return conditional_impl(target, given, y_given, kernel, &given_inv.inv, nullptr);
}

GaussianConditional gp_conditional(const LocationSet& target, const LocationSet& given,
                                   const Vector& y_given, const CovKernel& kernel,
                                   const SpdChol& given_chol) {
  if (given.empty()) return gp_marginal(target, kernel);
  return conditional_impl(target, given, y_given, kernel, nullptr, &given_chol);
}

GaussianConditional gp_marginal(const LocationSet& target, const CovKernel& kernel) {
  const auto t = static_cast<Eigen::Index>(target.size());
  return GaussianConditional{Vector::Constant(t, kernel.mean), cov_matrix(kernel, target)};
}

}  // namespace pogamp
