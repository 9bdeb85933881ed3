#include "pogamp/stats.hpp"

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_sf_erf.h>
#include <gsl/gsl_sf_gamma.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pogamp {

double mean(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
  const double m = mean(x);
  double acc = 0.0;
  for (double v : x) acc += (v - m) * (v - m);
  return acc / static_cast<double>(x.size() - 1);
}

double sd(const std::vector<double>& x) { return std::sqrt(variance(x)); }

double covariance(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - mx) * (y[i] - my);
  return acc / static_cast<double>(x.size() - 1);
}

double skewness(const std::vector<double>& x) {
  const double m = mean(x);
  double m2 = 0.0, m3 = 0.0;
  for (double v : x) {
    const double d = v - m;
    m2 += d * d;
    m3 += d * d * d;
  }
  const double n = static_cast<double>(x.size());
  m2 /= n;
  m3 /= n;
  return m3 / std::pow(m2, 1.5);
}

double excess_kurtosis(const std::vector<double>& x) {
  const double m = mean(x);
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - m;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double n = static_cast<double>(x.size());
  m2 /= n;
  m4 /= n;
  return m4 / (m2 * m2) - 3.0;
}

double quantile(std::vector<double> x, double p) {
  if (x.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - std::floor(h)) * (x[hi] - x[lo]);
}

double norm_cdf(double x) { return 0.5 * gsl_sf_erfc(-x / std::sqrt(2.0)); }

double log_norm_cdf(double x) {
  return gsl_sf_log_erfc(-x / std::sqrt(2.0)) - std::log(2.0);
}

double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

double t_cdf(double x, double nu) {
  if (nu >= 1e5) return norm_cdf(x);  // O(1/nu) below any tolerance we use
  return gsl_cdf_tdist_P(x, nu);
}

double log_t_cdf(double x, double nu) {
  const double p = t_cdf(x, nu);
  if (p > 1e-280) return std::log(p);
  // far lower tail: T(x; nu) ~ C(nu) nu^{(nu+1)/2} |x|^{-nu} / nu
  const double log_c = gsl_sf_lngamma(0.5 * (nu + 1.0)) - gsl_sf_lngamma(0.5 * nu) -
                       0.5 * std::log(nu * M_PI);
  return log_c + 0.5 * (nu + 1.0) * std::log(nu) - std::log(nu) - nu * std::log(std::abs(x));
}

double gamma_cdf(double x, double shape, double rate) {
  return gsl_cdf_gamma_P(x, shape, 1.0 / rate);
}

double kolmogorov_q(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-12 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_1sample(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  const double sn = std::sqrt(n);
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  return {d, kolmogorov_q(lambda)};
}

KsResult ks_2sample(std::vector<double> x, std::vector<double> y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const auto nx = x.size(), ny = y.size();
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < nx && j < ny) {
    const double xv = x[i], yv = y[j];
    if (xv <= yv) ++i;
    if (yv <= xv) ++j;
    const double fx = static_cast<double>(i) / static_cast<double>(nx);
    const double fy = static_cast<double>(j) / static_cast<double>(ny);
    d = std::max(d, std::abs(fx - fy));
  }
  const double ne = static_cast<double>(nx) * static_cast<double>(ny) /
                    static_cast<double>(nx + ny);
  const double sn = std::sqrt(ne);
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  return {d, kolmogorov_q(lambda)};
}

namespace {

std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double c = covariance(x, y);
  const double sx = sd(x), sy = sd(y);
  if (sx == 0.0 || sy == 0.0) return 0.0;
  return c / (sx * sy);
}

}  // namespace

SpearmanResult spearman_negative_trend(const std::vector<double>& x,
                                       const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("spearman needs matched samples of size >= 3");
  const std::vector<double> rx = ranks(x);
  std::vector<double> ry = ranks(y);
  const double rho = pearson(rx, ry);
  const std::size_t n = x.size();
  if (n <= 8) {
    // exact permutation distribution
    std::vector<double> perm = ry;
    std::sort(perm.begin(), perm.end());
    long total = 0, at_most = 0;
    do {
      const double r = pearson(rx, perm);
      ++total;
      if (r <= rho + 1e-12) ++at_most;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {rho, static_cast<double>(at_most) / static_cast<double>(total)};
  }
  const double t = rho * std::sqrt((static_cast<double>(n) - 2.0) / (1.0 - rho * rho));
  return {rho, t_cdf(t, static_cast<double>(n) - 2.0)};
}

double chi2_poisson_gof_pvalue(const std::vector<long>& observations, double lambda) {
  long max_obs = 0;
  for (long v : observations) max_obs = std::max(max_obs, v);
  const double n = static_cast<double>(observations.size());

  // Poisson pmf per count, tail pooled into the last bin
  std::vector<double> expected;
  std::vector<double> observed;
  double cum = 0.0;
  long upper = max_obs + 1;
  std::vector<double> pmf(static_cast<std::size_t>(upper) + 1, 0.0);
  double p = std::exp(-lambda);
  for (long k = 0; k <= upper; ++k) {
    pmf[static_cast<std::size_t>(k)] = p;
    cum += p;
    p *= lambda / static_cast<double>(k + 1);
  }
  std::vector<double> counts(static_cast<std::size_t>(upper) + 2, 0.0);
  for (long v : observations) counts[static_cast<std::size_t>(std::min(v, upper + 1))] += 1.0;

  // build bins with expected >= 5 by pooling from the left
  double e_acc = 0.0, o_acc = 0.0;
  for (long k = 0; k <= upper; ++k) {
    e_acc += n * pmf[static_cast<std::size_t>(k)];
    o_acc += counts[static_cast<std::size_t>(k)];
    if (e_acc >= 5.0) {
      expected.push_back(e_acc);
      observed.push_back(o_acc);
      e_acc = 0.0;
      o_acc = 0.0;
    }
  }
  // remaining tail (everything above upper included)
  e_acc += n * std::max(0.0, 1.0 - cum);
  o_acc += counts[static_cast<std::size_t>(upper) + 1];
  if (expected.empty() || e_acc > 0.5) {
    expected.push_back(std::max(e_acc, 1e-12));
    observed.push_back(o_acc);
  } else {
    expected.back() += e_acc;
    observed.back() += o_acc;
  }
  if (expected.size() < 2) return 1.0;

  double stat = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const double diff = observed[i] - expected[i];
    stat += diff * diff / expected[i];
  }
  const double dof = static_cast<double>(expected.size() - 1);
  return gsl_sf_gamma_inc_Q(0.5 * dof, 0.5 * stat);
}

double silverman_bandwidth(const std::vector<double>& x) {
  const double s = sd(x);
  std::vector<double> tmp = x;
  const double iqr = quantile(tmp, 0.75) - quantile(tmp, 0.25);
  const double a = std::min(s, iqr / 1.349);
  return 0.9 * a * std::pow(static_cast<double>(x.size()), -0.2);
}

std::vector<double> kde_gaussian(const std::vector<double>& samples,
                                 const std::vector<double>& grid, double bandwidth) {
  std::vector<double> out(grid.size(), 0.0);
  const double norm = 1.0 / (static_cast<double>(samples.size()) * bandwidth);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double acc = 0.0;
    for (double s : samples) acc += norm_pdf((grid[g] - s) / bandwidth);
    out[g] = acc * norm;
  }
  return out;
}

}  // namespace pogamp
