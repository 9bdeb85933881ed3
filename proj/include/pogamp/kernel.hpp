#ifndef POGAMP_KERNEL_HPP
#define POGAMP_KERNEL_HPP

#include <Eigen/Dense>
#include <string>

#include "pogamp/domain.hpp"

namespace pogamp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class KernelFamily { exponential, gaussian, matern32 };

KernelFamily kernel_family_from_string(const std::string& name);
std::string to_string(KernelFamily f);

// Stationary isotropic covariance function sigma2 * rho(d) with nugget tau2
// on the diagonal and a constant mean.
struct CovKernel {
  KernelFamily family = KernelFamily::exponential;
  double sigma2 = 1.0;  // partial sill
  double phi = 1.0;     // range
  double tau2 = 0.0;    // nugget
  double mean = 0.0;

  void validate() const {
    if (!(sigma2 > 0.0)) throw ConfigError("kernel sigma2 must be > 0");
    if (!(phi > 0.0)) throw ConfigError("kernel phi must be > 0");
    if (tau2 < 0.0) throw ConfigError("kernel tau2 must be >= 0");
  }

  double correlation(double d) const;
  double marginal_var() const { return sigma2 + tau2; }
};

// sigma2*rho(|s1-s2|), plus tau2 when the two sites coincide exactly.
double kernel_eval(const CovKernel& k, const Site& s1, const Site& s2);

Matrix cov_matrix(const CovKernel& k, const LocationSet& locs);

// Cross-covariance block; the nugget enters only where sites coincide exactly.
Matrix cross_cov(const CovKernel& k, const LocationSet& rows, const LocationSet& cols);

}  // namespace pogamp

#endif
