#ifndef POGAMP_STATS_HPP
#define POGAMP_STATS_HPP

#include <functional>
#include <vector>

namespace pogamp {

double mean(const std::vector<double>& x);
double variance(const std::vector<double>& x);  // unbiased
double sd(const std::vector<double>& x);
double covariance(const std::vector<double>& x, const std::vector<double>& y);
double skewness(const std::vector<double>& x);         // sample g1
double excess_kurtosis(const std::vector<double>& x);  // sample g2
double quantile(std::vector<double> x, double p);      // type-7 interpolation

// standard normal
double norm_cdf(double x);
double log_norm_cdf(double x);
double norm_pdf(double x);

// Student-t CDF and its log, robust in the far tail.
double t_cdf(double x, double nu);
double log_t_cdf(double x, double nu);

double gamma_cdf(double x, double shape, double rate);

// Kolmogorov asymptotic tail Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2)
double kolmogorov_q(double lambda);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// One-sample KS against a CDF; x need not be sorted.
KsResult ks_1sample(std::vector<double> x, const std::function<double(double)>& cdf);
// Two-sample KS with the usual asymptotic p-value.
KsResult ks_2sample(std::vector<double> x, std::vector<double> y);

struct SpearmanResult {
  double rho = 0.0;
  double p_one_sided_negative = 1.0;  // P(rho_perm <= rho observed)
};

// Spearman rank correlation with an exact permutation p-value for n <= 8 and
// a t approximation beyond. The one-sided p targets decreasing trends.
SpearmanResult spearman_negative_trend(const std::vector<double>& x,
                                       const std::vector<double>& y);

// Chi-square goodness-of-fit of observed counts against Poisson(lambda),
// pooling tail bins until every expected count is >= 5.
double chi2_poisson_gof_pvalue(const std::vector<long>& observations, double lambda);

double silverman_bandwidth(const std::vector<double>& x);
std::vector<double> kde_gaussian(const std::vector<double>& samples,
                                 const std::vector<double>& grid, double bandwidth);

}  // namespace pogamp

#endif
