#include "pogamp/kernel.hpp"

#include <cmath>

namespace pogamp {

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "exponential") return KernelFamily::exponential;
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "matern32") return KernelFamily::matern32;
  throw ConfigError("unknown kernel family: " + name);
}

std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::exponential: return "exponential";
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::matern32: return "matern32";
  }
  return "?";
}

double CovKernel::correlation(double d) const {
  const double u = d / phi;
  switch (family) {
    case KernelFamily::exponential: return std::exp(-u);
    case KernelFamily::gaussian: return std::exp(-u * u);
    case KernelFamily::matern32: {
      const double v = std::sqrt(3.0) * u;
      return (1.0 + v) * std::exp(-v);
    }
  }
  return 0.0;
}

double kernel_eval(const CovKernel& k, const Site& s1, const Site& s2) {
  if (same_site(s1, s2)) return k.sigma2 + k.tau2;
  return k.sigma2 * k.correlation(distance(s1, s2));
}

Matrix cov_matrix(const CovKernel& k, const LocationSet& locs) {
  const auto n = static_cast<Eigen::Index>(locs.size());
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = k.sigma2 + k.tau2;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = kernel_eval(k, locs[static_cast<std::size_t>(i)],
                                   locs[static_cast<std::size_t>(j)]);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Matrix cross_cov(const CovKernel& k, const LocationSet& rows, const LocationSet& cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      out(i, j) = kernel_eval(k, rows[static_cast<std::size_t>(i)],
                              cols[static_cast<std::size_t>(j)]);
  return out;
}

}  // namespace pogamp
