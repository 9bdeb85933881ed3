#ifndef POGAMP_FDIST_HPP
#define POGAMP_FDIST_HPP

#include <optional>

#include "pogamp/gaussian.hpp"

namespace pogamp {

enum class FFamily { skew_normal, student_t, skew_t };

FFamily ffamily_from_string(const std::string& name);
std::string to_string(FFamily f);

// The multivariate family f of the hierarchy. Skewness enters through a
// single latent factor shared by all coordinates (hidden truncation):
//
//   Z = delta |U0| 1 + sqrt(1 - delta^2) G,   G ~ N_k(0, R_kernel),
//   Y = xi + c Z            (skew-normal)
//   Y = xi + c Z / sqrt(W)  (skew-t, W ~ chi^2_nu / nu; alpha = 0 gives
//                            student-t)
//
// with delta = alpha / sqrt(1 + alpha^2). This is an Azzalini-type SN_k/ST_k
// with scale c^2[(1-delta^2) R + delta^2 11'] whose coordinate marginals do
// not depend on k, so the finite-dimensional laws approach the same 1-site
// marginal as the anchor set densifies.
//
// match_moments (the default wiring) pins the mean and the marginal variance
// to the kernel's; for the symmetric families (alpha = 0) the full covariance
// matrix then equals the kernel covariance exactly.
struct FDist {
  FFamily family = FFamily::skew_normal;
  double alpha = 0.0;  // skewness loading (skew families)
  double nu = 10.0;    // degrees of freedom (t families), must be > 2
  CovKernel scale_kernel;
  bool match_moments = true;

  bool has_skew() const { return family != FFamily::student_t; }
  bool has_tail() const { return family != FFamily::skew_normal; }

  void validate() const;
  // model-fitting range; the math layer itself accepts any nu > 2
  void validate_for_model() const;
};

// f instantiated at a fixed location set. Built once per (theta_f, S_N) and
// reused; all density quantities reduce to kernel-inverse products, so the
// precision form can ride on the sampler's cached inverses.
class PreparedF {
 public:
  // full form: owns a Cholesky factor of the kernel matrix (density + sampling)
  PreparedF(const FDist& f, const LocationSet& locs);
  PreparedF(const FDist& f, const LocationSet& locs, SpdChol kernel_chol);
  // precision form: reuses a cached kernel-matrix inverse (density only)
  PreparedF(const FDist& f, const LocationSet& locs, const Matrix& kernel_inv,
            double kernel_logdet);

  double logdensity(const Vector& y) const;
  Vector sample(Rng& rng) const;

  Vector mean() const;
  Matrix covariance() const;  // needs the full form

  Eigen::Index dim() const { return k_; }
  const Vector& location() const { return xi_; }
  // the kernel-matrix factor, when this object owns one (for reuse)
  const SpdChol* kernel_chol() const { return chol_ ? &*chol_ : nullptr; }

 private:
  void build();
  Vector kernel_solve(const Vector& v) const;  // Sigma^{-1} v

  FDist f_;
  Eigen::Index k_ = 0;
  std::optional<SpdChol> chol_;
  std::optional<Matrix> sigma_;  // kept by the full form for covariance()
  Matrix inv_;                   // used iff !chol_
  double kernel_logdet_ = 0.0;

  double delta_ = 0.0;  // alpha / sqrt(1 + alpha^2)
  double c2_ = 1.0;     // value-space scale
  double mz_ = 0.0;     // E|U0| scaling: sqrt(2/pi) or b_nu
  Vector xi_;
  Vector sinv_one_;      // Sigma^{-1} 1
  double s11_ = 0.0;     // 1' R^{-1} 1
  double denom_ = 1.0;   // (1-delta^2) + delta^2 s11
  double logdet_omega_ = 0.0;
};

// free-function conveniences
double fdist_logdensity(const FDist& f, const LocationSet& locs, const Vector& y);
Vector fdist_sample(Rng& rng, const FDist& f, const LocationSet& locs);
Matrix fdist_cov(const FDist& f, const LocationSet& locs);
Vector fdist_mean(const FDist& f, const LocationSet& locs);

// One-site marginal with mean mu and kernel marginal variance var. This is
// what the convergence ladder and the PC prior integrate against.
struct F1d {
  FFamily family;
  double alpha;
  double nu;
  double mu;
  double var;
  bool matched;

  double logpdf(double x) const;
  double pdf(double x) const { return std::exp(logpdf(x)); }
};

F1d f_marginal_1d(const FDist& f, double mu, double var);

double b_nu(double nu);  // E|T_nu| scaling, sqrt(nu/pi) Gamma((nu-1)/2)/Gamma(nu/2)

}  // namespace pogamp

#endif
