#ifndef POGAMP_TESTS_SUPPORT_HPP
#define POGAMP_TESTS_SUPPORT_HPP

// Test-only oracles, kept independent of the library's cached code paths.

#include <cmath>
#include <vector>

#include "pogamp/mcmc.hpp"

namespace pogamp::testing {

// Brute-force GP-only posterior sampler for (sigma2, phi) with log-normal
// priors: plain Metropolis on the log scale, rebuilding and factoring the
// dense covariance with raw Eigen at every evaluation.
struct GpOracleDraws {
  std::vector<double> sigma2;
  std::vector<double> phi;
};

inline double gp_oracle_logpost(const LocationSet& locs, const Vector& y, double mu,
                                KernelFamily family, double sigma2, double phi,
                                double tau2, const LogNormalPrior& pr_s,
                                const LogNormalPrior& pr_p) {
  const auto n = static_cast<Eigen::Index>(locs.size());
  Matrix s(n, n);
  CovKernel k{family, sigma2, phi, tau2, mu};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      s(i, j) = kernel_eval(k, locs[static_cast<std::size_t>(i)],
                            locs[static_cast<std::size_t>(j)]);
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const Matrix l = llt.matrixL();
  const Vector z = l.triangularView<Eigen::Lower>().solve(
      y - Vector::Constant(n, mu));
  const double logdet = 2.0 * l.diagonal().array().log().sum();
  double out = -0.5 * (n * std::log(2.0 * M_PI) + logdet + z.squaredNorm());
  const auto ln_pdf = [](double v, const LogNormalPrior& p) {
    const double t = (std::log(v) - p.mu_log) / p.sd_log;
    return -std::log(v) - std::log(p.sd_log) - 0.5 * std::log(2.0 * M_PI) - 0.5 * t * t;
  };
  out += ln_pdf(sigma2, pr_s) + ln_pdf(phi, pr_p);
  return out;
}

inline GpOracleDraws gp_only_sampler(Rng& rng, const LocationSet& locs, const Vector& y,
                                     double mu, KernelFamily family, double tau2,
                                     const LogNormalPrior& pr_s, const LogNormalPrior& pr_p,
                                     long iters, long burn, int thin) {
  GpOracleDraws draws;
  double s2 = 1.0, phi = 0.3;
  double lp = gp_oracle_logpost(locs, y, mu, family, s2, phi, tau2, pr_s, pr_p);
  for (long t = 1; t <= iters; ++t) {
    {
      const double cand = s2 * std::exp(0.4 * rng.normal());
      const double lc =
          gp_oracle_logpost(locs, y, mu, family, cand, phi, tau2, pr_s, pr_p);
      if (std::log(rng.uniform()) < lc - lp + std::log(cand) - std::log(s2)) {
        s2 = cand;
        lp = lc;
      }
    }
    {
      const double cand = phi * std::exp(0.4 * rng.normal());
      const double lc =
          gp_oracle_logpost(locs, y, mu, family, s2, cand, tau2, pr_s, pr_p);
      if (std::log(rng.uniform()) < lc - lp + std::log(cand) - std::log(phi)) {
        phi = cand;
        lp = lc;
      }
    }
    if (t > burn && (t - burn) % thin == 0) {
      draws.sigma2.push_back(s2);
      draws.phi.push_back(phi);
    }
  }
  return draws;
}

// synthetic GP observations at random sites
inline void make_gp_data(Rng& rng, const Domain& domain, const CovKernel& kernel, int n,
                         double min_sep, LocationSet* locs, Vector* y) {
  locs->sites.clear();
  while (static_cast<int>(locs->size()) < n) {
    Site s{rng.uniform(domain.x_min, domain.x_max), rng.uniform(domain.y_min, domain.y_max)};
    bool ok = true;
    for (const Site& t : locs->sites)
      if (distance(s, t) < min_sep) ok = false;
    if (ok) locs->append(s);
  }
  *y = mvn_sample(rng, Vector::Constant(n, kernel.mean), cov_matrix(kernel, *locs));
}

}  // namespace pogamp::testing

#endif
