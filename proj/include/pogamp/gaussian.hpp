#ifndef POGAMP_GAUSSIAN_HPP
#define POGAMP_GAUSSIAN_HPP

#include "pogamp/linalg.hpp"

namespace pogamp {

double mvn_logdensity(const Vector& y, const Vector& mean, const Matrix& cov);
double mvn_logdensity(const Vector& y, const Vector& mean, const SpdChol& chol);
// precision-form evaluation for cached inverses
double mvn_logdensity_prec(const Vector& y, const Vector& mean, const Matrix& inv,
                           double logdet_cov);

Vector mvn_sample(Rng& rng, const Vector& mean, const Matrix& cov);
Vector mvn_sample(Rng& rng, const Vector& mean, const SpdChol& chol);

struct GaussianConditional {
  Vector mean;
  Matrix cov;
};

// Conditional law of the base GP at `target`, given values y_given at `given`.
// The inverse of cov(given) is supplied by the caller (cache or factor form).
GaussianConditional gp_conditional(const LocationSet& target, const LocationSet& given,
                                   const Vector& y_given, const CovKernel& kernel,
                                   const InverseCache& given_inv);
GaussianConditional gp_conditional(const LocationSet& target, const LocationSet& given,
                                   const Vector& y_given, const CovKernel& kernel,
                                   const SpdChol& given_chol);

// Unconditional law at `target` (used when the conditioning set is empty).
GaussianConditional gp_marginal(const LocationSet& target, const CovKernel& kernel);

}  // namespace pogamp

#endif
