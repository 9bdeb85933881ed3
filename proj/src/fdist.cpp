#include "pogamp/fdist.hpp"

#include <gsl/gsl_sf_gamma.h>

#include <cmath>

#include "pogamp/stats.hpp"

namespace pogamp {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kLog2 = 0.6931471805599453094;
}  // namespace

FFamily ffamily_from_string(const std::string& name) {
  if (name == "skew_normal") return FFamily::skew_normal;
  if (name == "student_t") return FFamily::student_t;
  if (name == "skew_t") return FFamily::skew_t;
  throw UnsupportedFamily("unknown f family: " + name);
}

std::string to_string(FFamily f) {
  switch (f) {
    case FFamily::skew_normal: return "skew_normal";
    case FFamily::student_t: return "student_t";
    case FFamily::skew_t: return "skew_t";
  }
  return "?";
}

double b_nu(double nu) {
  return std::sqrt(nu / M_PI) *
         std::exp(gsl_sf_lngamma(0.5 * (nu - 1.0)) - gsl_sf_lngamma(0.5 * nu));
}

void FDist::validate() const {
  scale_kernel.validate();
  if (has_tail() && !(nu > 2.0))
    throw DegreesOfFreedomTooSmall("t families require nu > 2 so the covariance exists");
  if (!std::isfinite(alpha)) throw ConfigError("alpha must be finite");
}

void FDist::validate_for_model() const {
  validate();
  if (has_tail() && nu > 200.0)
    throw ConfigError("model nu is restricted to (2, 200]");
}

PreparedF::PreparedF(const FDist& f, const LocationSet& locs) : f_(f) {
  f_.validate();
  k_ = static_cast<Eigen::Index>(locs.size());
  if (k_ == 0) return;
  sigma_ = cov_matrix(f.scale_kernel, locs);
  chol_ = cholesky(*sigma_);
  kernel_logdet_ = chol_->log_det;
  build();
}

PreparedF::PreparedF(const FDist& f, const LocationSet& locs, SpdChol kernel_chol)
    : f_(f), k_(static_cast<Eigen::Index>(locs.size())), chol_(std::move(kernel_chol)) {
  f_.validate();
  if (k_ == 0) return;
  kernel_logdet_ = chol_->log_det;
  build();
}

PreparedF::PreparedF(const FDist& f, const LocationSet& locs, const Matrix& kernel_inv,
                     double kernel_logdet)
    : f_(f),
      k_(static_cast<Eigen::Index>(locs.size())),
      inv_(kernel_inv),
      kernel_logdet_(kernel_logdet) {
  f_.validate();
  if (k_ == 0) return;
  build();
}

Vector PreparedF::kernel_solve(const Vector& v) const {
  if (chol_) return chol_->solve(v);
  return inv_ * v;
}

void PreparedF::build() {
  const double mu = f_.scale_kernel.mean;
  const double v = f_.scale_kernel.marginal_var();
  const double nu = f_.nu;
  const double alpha = f_.has_skew() ? f_.alpha : 0.0;
  const double kd = static_cast<double>(k_);

  delta_ = alpha / std::sqrt(1.0 + alpha * alpha);
  mz_ = f_.family == FFamily::skew_normal ? std::sqrt(2.0 / M_PI)
        : f_.family == FFamily::skew_t    ? b_nu(nu)
                                          : 0.0;

  if (f_.match_moments) {
    // pin the marginal variance: Var(Y_i) = c^2 (tail_var - mz^2 delta^2) = v
    const double tail_var = f_.has_tail() ? nu / (nu - 2.0) : 1.0;
    c2_ = v / (tail_var - mz_ * mz_ * delta_ * delta_);
  } else {
    c2_ = v;
  }

  const double one_minus_d2 = 1.0 - delta_ * delta_;
  if (alpha != 0.0) {
    sinv_one_ = kernel_solve(Vector::Ones(k_));
    s11_ = v * sinv_one_.sum();  // 1' R^{-1} 1
    denom_ = one_minus_d2 + delta_ * delta_ * s11_;
    logdet_omega_ = kd * std::log(c2_) + (kd - 1.0) * std::log(one_minus_d2) +
                    std::log(denom_) + (kernel_logdet_ - kd * std::log(v));
  } else {
    sinv_one_ = Vector::Zero(k_);
    s11_ = 0.0;
    denom_ = 1.0;
    // Omega = c^2 R
    logdet_omega_ = kd * std::log(c2_) + (kernel_logdet_ - kd * std::log(v));
  }

  xi_ = Vector::Constant(k_, mu);
  if (f_.match_moments && alpha != 0.0)
    xi_.array() -= std::sqrt(c2_) * delta_ * mz_;
}

double PreparedF::logdensity(const Vector& y) const {
  if (k_ == 0) return 0.0;  // empty-anchor convention f_0 == 1
  if (y.size() != k_) throw PogampError("fdist logdensity: dimension mismatch");
  const double v = f_.scale_kernel.marginal_var();
  const double alpha = f_.has_skew() ? f_.alpha : 0.0;
  const double kd = static_cast<double>(k_);

  const Vector zbar = (y - xi_) / std::sqrt(c2_);
  const double zRz = v * zbar.dot(kernel_solve(zbar));  // zbar' R^{-1} zbar
  double q;
  double w = 0.0;
  if (alpha != 0.0) {
    const double uz = v * sinv_one_.dot(zbar);  // 1' R^{-1} zbar
    q = (zRz - delta_ * delta_ * uz * uz / denom_) / (1.0 - delta_ * delta_);
    w = alpha * uz * std::sqrt((1.0 + alpha * alpha) /
                               (1.0 + alpha * alpha * s11_));
  } else {
    q = zRz;
  }
  q = std::max(q, 0.0);

  double log_sym;
  if (!f_.has_tail()) {
    log_sym = -0.5 * (kd * kLog2Pi + logdet_omega_ + q);
  } else {
    const double nu = f_.nu;
    log_sym = gsl_sf_lngamma(0.5 * (nu + kd)) - gsl_sf_lngamma(0.5 * nu) -
              0.5 * kd * std::log(nu * M_PI) - 0.5 * logdet_omega_ -
              0.5 * (nu + kd) * std::log1p(q / nu);
  }
  if (alpha == 0.0) return log_sym;

  double log_skew;
  if (!f_.has_tail()) {
    log_skew = log_norm_cdf(w);
  } else {
    const double nu = f_.nu;
    log_skew = log_t_cdf(w * std::sqrt((nu + kd) / (nu + q)), nu + kd);
  }
  return kLog2 + log_sym + log_skew;
}

Vector PreparedF::sample(Rng& rng) const {
  if (k_ == 0) return Vector(0);
  if (!chol_) throw PogampError("PreparedF: sampling needs the factor form");
  const double v = f_.scale_kernel.marginal_var();
  const double alpha = f_.has_skew() ? f_.alpha : 0.0;

  Vector z(k_);
  for (Eigen::Index i = 0; i < k_; ++i) z(i) = rng.normal();
  Vector g = chol_->apply_factor(z) / std::sqrt(v);  // N(0, R)

  Vector zvec;
  if (alpha == 0.0) {
    zvec = g;
  } else {
    const double u0 = std::abs(rng.normal());
    zvec = (delta_ * u0) * Vector::Ones(k_) +
           std::sqrt(1.0 - delta_ * delta_) * g;
  }
  if (f_.has_tail()) zvec /= std::sqrt(rng.scaled_chisq(f_.nu));
  return xi_ + std::sqrt(c2_) * zvec;
}

Vector PreparedF::mean() const {
  return xi_ + Vector::Constant(k_, std::sqrt(c2_) * delta_ * mz_);
}

Matrix PreparedF::covariance() const {
  if (!sigma_) throw PogampError("PreparedF: covariance needs the full form");
  const double v = f_.scale_kernel.marginal_var();
  const double tail = f_.has_tail() ? f_.nu / (f_.nu - 2.0) : 1.0;
  const double d2 = delta_ * delta_;
  const Matrix r = *sigma_ / v;
  const Matrix omega_bar =
      (1.0 - d2) * r + d2 * Matrix::Ones(k_, k_);  // scale correlation
  return c2_ * (tail * omega_bar -
                mz_ * mz_ * d2 * Matrix::Ones(k_, k_));
}

double fdist_logdensity(const FDist& f, const LocationSet& locs, const Vector& y) {
  if (locs.empty()) return 0.0;
  return PreparedF(f, locs).logdensity(y);
}

Vector fdist_sample(Rng& rng, const FDist& f, const LocationSet& locs) {
  if (locs.empty()) return Vector(0);
  return PreparedF(f, locs).sample(rng);
}

Matrix fdist_cov(const FDist& f, const LocationSet& locs) {
  return PreparedF(f, locs).covariance();
}

Vector fdist_mean(const FDist& f, const LocationSet& locs) {
  if (locs.empty()) return Vector(0);
  return PreparedF(f, locs).mean();
}

F1d f_marginal_1d(const FDist& f, double mu, double var) {
  return F1d{f.family, f.has_skew() ? f.alpha : 0.0, f.nu, mu, var, f.match_moments};
}

double F1d::logpdf(double x) const {
  const bool tail = family != FFamily::skew_normal;
  const bool skew = family != FFamily::student_t;
  const double a = skew ? alpha : 0.0;
  const double delta = a / std::sqrt(1.0 + a * a);
  const double mz = family == FFamily::skew_normal ? std::sqrt(2.0 / M_PI)
                    : family == FFamily::skew_t    ? b_nu(nu)
                                                   : 0.0;
  const double tail_var = tail ? nu / (nu - 2.0) : 1.0;
  const double omega2 = matched ? var / (tail_var - mz * mz * delta * delta) : var;
  const double omega = std::sqrt(omega2);
  const double xi = (matched && a != 0.0) ? mu - mz * omega * delta : mu;

  const double z = (x - xi) / omega;
  double log_sym;
  if (!tail) {
    log_sym = -0.5 * (kLog2Pi + z * z) - std::log(omega);
  } else {
    log_sym = gsl_sf_lngamma(0.5 * (nu + 1.0)) - gsl_sf_lngamma(0.5 * nu) -
              0.5 * std::log(nu * M_PI) - std::log(omega) -
              0.5 * (nu + 1.0) * std::log1p(z * z / nu);
  }
  if (a == 0.0) return log_sym;
  double log_skew;
  if (!tail)
    log_skew = log_norm_cdf(a * z);
  else
    log_skew = log_t_cdf(a * z * std::sqrt((nu + 1.0) / (nu + z * z)), nu + 1.0);
  return kLog2 + log_sym + log_skew;
}

}  // namespace pogamp
