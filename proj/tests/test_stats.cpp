#include <doctest.h>

#include <cmath>

#include "pogamp/common.hpp"
#include "pogamp/quadrature.hpp"
#include "pogamp/stats.hpp"

using namespace pogamp;

TEST_CASE("moments of a fixed sample") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(mean(x) == doctest::Approx(3.0));
  CHECK(variance(x) == doctest::Approx(2.5));
  CHECK(quantile(x, 0.5) == doctest::Approx(3.0));
  CHECK(quantile(x, 0.0) == doctest::Approx(1.0));
  CHECK(quantile(x, 1.0) == doctest::Approx(5.0));
}

TEST_CASE("normal and t CDFs against known values") {
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5));
  CHECK(norm_cdf(1.959963985) == doctest::Approx(0.975).epsilon(1e-6));
  CHECK(log_norm_cdf(-10.0) == doctest::Approx(std::log(norm_cdf(-10.0))).epsilon(1e-8));
  // deep tail stays finite and matches the asymptotic expansion direction
  CHECK(log_norm_cdf(-40.0) < -700.0);
  CHECK(std::isfinite(log_norm_cdf(-40.0)));

  CHECK(t_cdf(0.0, 5.0) == doctest::Approx(0.5));
  // t_3 at 1.0: known value 0.80449889...
  CHECK(t_cdf(1.0, 3.0) == doctest::Approx(0.8044988905).epsilon(1e-8));
  // large nu converges to the normal
  CHECK(t_cdf(1.3, 2e5) == doctest::Approx(norm_cdf(1.3)).epsilon(1e-4));
  // far tail of log_t_cdf is finite and decreasing
  CHECK(std::isfinite(log_t_cdf(-1e8, 3.0)));
  CHECK(log_t_cdf(-1e8, 3.0) < log_t_cdf(-1e7, 3.0));
}

TEST_CASE("one-sample KS detects the right distribution and rejects the wrong one") {
  Rng rng(11);
  std::vector<double> x(4000);
  for (auto& v : x) v = rng.normal();
  const auto right = ks_1sample(x, [](double v) { return norm_cdf(v); });
  CHECK(right.p_value > 0.01);
  const auto wrong = ks_1sample(x, [](double v) { return norm_cdf(v - 0.5); });
  CHECK(wrong.p_value < 1e-6);
}

TEST_CASE("two-sample KS on identical samples is exactly zero") {
  std::vector<double> x{0.3, -1.0, 2.0, 0.7};
  const auto r = ks_2sample(x, x);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == doctest::Approx(1.0));
}

TEST_CASE("two-sample KS calibration") {
  Rng rng(13);
  std::vector<double> x(3000), y(3000);
  for (auto& v : x) v = rng.normal();
  for (auto& v : y) v = rng.normal();
  CHECK(ks_2sample(x, y).p_value > 0.01);
  for (auto& v : y) v += 0.3;
  CHECK(ks_2sample(x, y).p_value < 1e-8);
}

TEST_CASE("spearman exact permutation p-value for n=4") {
  // perfectly decreasing: rho = -1, exact one-sided p = 1/24
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{9, 7, 5, 3};
  const auto r = spearman_negative_trend(x, y);
  CHECK(r.rho == doctest::Approx(-1.0));
  CHECK(r.p_one_sided_negative == doctest::Approx(1.0 / 24.0).epsilon(1e-9));
  // increasing trend is not significant
  const auto r2 = spearman_negative_trend(x, {1, 2, 3, 4});
  CHECK(r2.p_one_sided_negative > 0.9);
}

TEST_CASE("chi-square Poisson GOF accepts Poisson counts and rejects shifted ones") {
  Rng rng(17);
  std::vector<long> counts(5000);
  for (auto& c : counts) c = rng.poisson(4.0);
  CHECK(chi2_poisson_gof_pvalue(counts, 4.0) > 0.01);
  CHECK(chi2_poisson_gof_pvalue(counts, 5.0) < 1e-6);
}

TEST_CASE("gamma CDF matches a hand value") {
  // Gamma(shape 2, rate 1): F(2) = 1 - e^-2 (1 + 2)
  CHECK(gamma_cdf(2.0, 2.0, 1.0) == doctest::Approx(1.0 - std::exp(-2.0) * 3.0).epsilon(1e-10));
}

TEST_CASE("adaptive quadrature integrates a gaussian to 1") {
  const double v = integrate_1d_real_line(
      [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); });
  CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
  const double half = integrate_1d(
      [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }, 0.0, 50.0);
  CHECK(half == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("2-D quadrature over a rectangle") {
  Domain d{0.0, 2.0, 0.0, 3.0};
  const double v = integrate_2d([](double x, double y) { return x * y; }, d, 1e-8);
  CHECK(v == doctest::Approx(2.0 * 4.5).epsilon(1e-7));
}

TEST_CASE("rng substreams are deterministic and distinct") {
  Rng a(123), b(123);
  CHECK(a.substream(5).normal() == b.substream(5).normal());
  CHECK(a.substream(5).normal() != a.substream(6).normal());
}
