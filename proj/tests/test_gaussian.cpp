#include <doctest.h>

#include <cmath>

#include "pogamp/gaussian.hpp"
#include "pogamp/stats.hpp"

using namespace pogamp;

TEST_CASE("mvn log density closed forms") {
  // standard bivariate at the origin
  const Vector z2 = Vector::Zero(2);
  CHECK(mvn_logdensity(z2, z2, Matrix::Identity(2, 2)) ==
        doctest::Approx(-std::log(2.0 * M_PI)).epsilon(1e-12));
  // 1-D unit normal at 1
  Vector y1(1), m1(1);
  y1 << 1.0;
  m1 << 0.0;
  CHECK(mvn_logdensity(y1, m1, Matrix::Identity(1, 1)) ==
        doctest::Approx(-0.5 * std::log(2.0 * M_PI) - 0.5).epsilon(1e-12));
}

TEST_CASE("mvn log density matches an independently coded formula on a random case") {
  Rng rng(71);
  Matrix a(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = rng.normal();
  const Matrix cov = a.transpose() * a + 2.0 * Matrix::Identity(4, 4);
  Vector y(4), mu(4);
  for (int i = 0; i < 4; ++i) {
    y(i) = rng.normal();
    mu(i) = 0.3 * rng.normal();
  }
  // textbook evaluation through LU determinant and explicit inverse
  const double quad = (y - mu).dot(cov.partialPivLu().solve(y - mu));
  const double expected =
      -0.5 * (4.0 * std::log(2.0 * M_PI) + std::log(cov.determinant()) + quad);
  CHECK(mvn_logdensity(y, mu, cov) == doctest::Approx(expected).epsilon(1e-10));

  // precision form agrees
  const Matrix inv = cov.partialPivLu().solve(Matrix::Identity(4, 4));
  CHECK(mvn_logdensity_prec(y, mu, inv, std::log(cov.determinant())) ==
        doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("mvn sampling: fixed seed reproduces, moments match") {
  Matrix cov(1, 1);
  cov << 1.0;
  Vector mu(1);
  mu << 0.0;
  Rng a(5), b(5);
  CHECK(mvn_sample(a, mu, cov)(0) == mvn_sample(b, mu, cov)(0));

  Rng rng(99);
  std::vector<double> draws(100000);
  const SpdChol chol = cholesky(cov);
  for (auto& v : draws) v = mvn_sample(rng, mu, chol)(0);
  CHECK(variance(draws) > 0.98);
  CHECK(variance(draws) < 1.02);
  CHECK(std::abs(mean(draws)) < 0.011);

  // degenerate limit: tiny covariance concentrates at the mean
  Matrix tiny(2, 2);
  tiny << 1e-12, 0.0, 0.0, 1e-12;
  Vector mu2(2);
  mu2 << 3.0, -1.0;
  const Vector d = mvn_sample(rng, mu2, tiny);
  CHECK(std::abs(d(0) - 3.0) < 1e-3);
  CHECK(std::abs(d(1) + 1.0) < 1e-3);
}

TEST_CASE("gp_conditional decorrelation and interpolation limits") {
  CovKernel k{KernelFamily::exponential, 1.5, 0.2, 0.0, 0.7};
  LocationSet given{{Site{0.1, 0.1}, Site{0.3, 0.2}, Site{0.2, 0.4}}};
  Vector y(3);
  y << 2.0, 1.0, 0.5;
  const InverseCache inv = make_inverse_cache(given, k);

  // far target: mean ~ mu, variance ~ marginal
  LocationSet far{{Site{0.1 + 50.0 * k.phi, 0.1}}};
  const GaussianConditional cf = gp_conditional(far, given, y, k, inv);
  CHECK(cf.mean(0) == doctest::Approx(k.mean).epsilon(1e-6));
  CHECK(cf.cov(0, 0) == doctest::Approx(k.marginal_var()).epsilon(1e-6));

  // coincident target with zero nugget interpolates
  LocationSet at{{Site{0.3, 0.2}}};
  const GaussianConditional ci = gp_conditional(at, given, y, k, inv);
  CHECK(ci.mean(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(ci.cov(0, 0)) < 1e-8);
}

TEST_CASE("gp_conditional equals brute-force joint-normal conditioning") {
  CovKernel k{KernelFamily::matern32, 1.1, 0.5, 0.0, -0.4};
  Rng rng(81);
  LocationSet given, target;
  for (int i = 0; i < 3; ++i) given.append(Site{rng.uniform(), rng.uniform()});
  for (int i = 0; i < 2; ++i) target.append(Site{rng.uniform(), rng.uniform()});
  Vector y(3);
  for (int i = 0; i < 3; ++i) y(i) = rng.normal();

  const GaussianConditional got =
      gp_conditional(target, given, y, k, make_inverse_cache(given, k));

  // oracle: condition inside the full 5x5 joint covariance via raw Eigen
  const LocationSet joint = LocationSet::concat(target, given);
  const Matrix s = cov_matrix(k, joint);
  const Matrix s_tt = s.topLeftCorner(2, 2);
  const Matrix s_tg = s.topRightCorner(2, 3);
  const Matrix s_gg = s.bottomRightCorner(3, 3);
  const Vector mu_t = Vector::Constant(2, k.mean);
  const Vector mu_g = Vector::Constant(3, k.mean);
  const Matrix w = s_tg * s_gg.inverse();
  const Vector mean_oracle = mu_t + w * (y - mu_g);
  const Matrix cov_oracle = s_tt - w * s_tg.transpose();

  CHECK((got.mean - mean_oracle).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((got.cov - cov_oracle).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("property: conditional matches brute force for random sizes") {
  Rng rng(91);
  for (int trial = 0; trial < 20; ++trial) {
    const int g = 1 + static_cast<int>(rng.uniform() * 8);
    const int t = 1 + static_cast<int>(rng.uniform() * 3);
    CovKernel k{KernelFamily::exponential, 0.5 + rng.uniform(), 0.1 + 0.4 * rng.uniform(),
                0.05 * rng.uniform(), rng.normal()};
    LocationSet given, target;
    for (int i = 0; i < g; ++i) given.append(Site{rng.uniform(3.0, 4.0), rng.uniform()});
    for (int i = 0; i < t; ++i) target.append(Site{rng.uniform(3.0, 4.0), rng.uniform()});
    Vector y(g);
    for (int i = 0; i < g; ++i) y(i) = rng.normal();

    const GaussianConditional got =
        gp_conditional(target, given, y, k, make_inverse_cache(given, k));

    const LocationSet joint = LocationSet::concat(target, given);
    const Matrix s = cov_matrix(k, joint);
    const Matrix w = s.topRightCorner(t, g) * s.bottomRightCorner(g, g).inverse();
    const Vector mean_oracle =
        Vector::Constant(t, k.mean) + w * (y - Vector::Constant(g, k.mean));
    const Matrix cov_oracle =
        s.topLeftCorner(t, t) - w * s.topRightCorner(t, g).transpose();
    CHECK((got.mean - mean_oracle).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((got.cov - cov_oracle).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("gp_conditional with empty given set returns the marginal") {
  CovKernel k{KernelFamily::exponential, 1.0, 1.0, 0.0, 2.5};
  LocationSet t{{Site{0.5, 0.5}}};
  const GaussianConditional c =
      gp_conditional(t, LocationSet{}, Vector(0), k, InverseCache::empty());
  CHECK(c.mean(0) == doctest::Approx(2.5));
  CHECK(c.cov(0, 0) == doctest::Approx(1.0));
}
