#include <doctest.h>

#include <cmath>

#include "pogamp/linalg.hpp"

using namespace pogamp;

namespace {

LocationSet random_sites(Rng& rng, int n, double side = 1.0, double min_sep = 0.03) {
  LocationSet out;
  while (static_cast<int>(out.size()) < n) {
    const Site s{rng.uniform(0.0, side), rng.uniform(0.0, side)};
    bool ok = true;
    for (const Site& t : out.sites)
      if (distance(s, t) < min_sep) ok = false;
    if (ok) out.append(s);
  }
  return out;
}

// independent oracle: plain dense inversion through partial-pivot LU
Matrix direct_inverse(const Matrix& a) {
  return a.partialPivLu().solve(Matrix::Identity(a.rows(), a.cols()));
}

}  // namespace

TEST_CASE("cholesky of the identity is the identity") {
  const SpdChol c = cholesky(Matrix::Identity(3, 3));
  CHECK((c.lower - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(c.log_det == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("cholesky matches the hand-checkable 2x2") {
  Matrix a(2, 2);
  a << 4.0, 2.0, 2.0, 3.0;
  const SpdChol c = cholesky(a);
  CHECK(c.lower(0, 0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(c.lower(1, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(c.lower(1, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(c.lower(0, 1) == 0.0);
}

TEST_CASE("cholesky reconstructs a random SPD matrix") {
  Rng rng(21);
  Matrix a(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) a(i, j) = rng.normal();
  const Matrix spd = a.transpose() * a + Matrix::Identity(6, 6);
  const SpdChol c = cholesky(spd);
  const Matrix rec = c.lower * c.lower.transpose();
  CHECK((rec - spd).cwiseAbs().maxCoeff() <= 1e-8 * spd.cwiseAbs().maxCoeff());
  // log determinant equals the direct determinant
  CHECK(c.log_det == doctest::Approx(std::log(spd.determinant())).epsilon(1e-9));
}

TEST_CASE("cholesky reports failure on an indefinite matrix") {
  Matrix bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(cholesky(bad), NotPositiveDefinite);
}

TEST_CASE("inverse cache satisfies inv * Sigma = I") {
  CovKernel k{KernelFamily::exponential, 1.3, 0.4, 0.05, 0.0};
  Rng rng(31);
  const LocationSet locs = random_sites(rng, 8);
  const InverseCache cache = make_inverse_cache(locs, k);
  const Matrix sigma = cov_matrix(k, locs);
  CHECK((cache.inv * sigma - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(cache.logdet == doctest::Approx(std::log(sigma.determinant())).epsilon(1e-8));
}

TEST_CASE("inverse_add with an infinitely distant site is block diagonal") {
  CovKernel k{KernelFamily::exponential, 1.0, 0.3, 0.0, 0.0};
  LocationSet base{{Site{0.0, 0.0}}};
  const InverseCache cache = make_inverse_cache(base, k);
  LocationSet far{{Site{1e6, 1e6}}};
  const InverseCache grown = inverse_add(cache, far, k);
  CHECK(grown.inv(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(grown.inv(1, 1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(grown.inv(0, 1)) < 1e-9);
  // new locations are prepended
  CHECK(grown.locations[0].x == doctest::Approx(1e6));
}

TEST_CASE("inverse_add matches the direct inversion oracle") {
  CovKernel k{KernelFamily::exponential, 1.0, 0.35, 0.0, 0.0};
  Rng rng(41);
  const LocationSet old_locs = random_sites(rng, 5);
  const LocationSet new_locs = random_sites(rng, 2);
  const InverseCache cache = make_inverse_cache(old_locs, k);
  const InverseCache grown = inverse_add(cache, new_locs, k);

  const LocationSet joint = LocationSet::concat(new_locs, old_locs);
  const Matrix oracle = direct_inverse(cov_matrix(k, joint));
  CHECK((grown.inv - oracle).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(grown.logdet ==
        doctest::Approx(std::log(cov_matrix(k, joint).determinant())).epsilon(1e-8));
}

TEST_CASE("inverse_remove: no-op, oracle, and scalar cases") {
  CovKernel k{KernelFamily::exponential, 1.0, 0.4, 0.0, 0.0};
  Rng rng(43);
  const LocationSet locs = random_sites(rng, 6);
  const InverseCache cache = make_inverse_cache(locs, k);

  const InverseCache same = inverse_remove(cache, {});
  CHECK((same.inv - cache.inv).cwiseAbs().maxCoeff() == 0.0);

  const InverseCache reduced = inverse_remove(cache, {1, 4});
  std::vector<int> keep{0, 2, 3, 5};
  const LocationSet kept = locs.subset(keep);
  const Matrix oracle = direct_inverse(cov_matrix(k, kept));
  CHECK((reduced.inv - oracle).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(reduced.logdet ==
        doctest::Approx(std::log(cov_matrix(k, kept).determinant())).epsilon(1e-8));

  const InverseCache scalar = inverse_remove(cache, {0, 1, 2, 3, 4});
  CHECK(scalar.dim() == 1);
  CHECK(scalar.inv(0, 0) == doctest::Approx(1.0 / k.marginal_var()).epsilon(1e-9));

  CHECK_THROWS(inverse_remove(cache, {0, 1, 2, 3, 4, 5}));
  CHECK_THROWS(inverse_remove(cache, {0, 0}));
  CHECK_THROWS(inverse_remove(cache, {6}));
}

TEST_CASE("add-then-remove round trip recovers the original inverse") {
  CovKernel k{KernelFamily::matern32, 0.8, 0.5, 0.01, 0.0};
  Rng rng(47);
  const LocationSet locs = random_sites(rng, 7);
  const LocationSet extra = random_sites(rng, 3);
  const InverseCache cache = make_inverse_cache(locs, k);
  const InverseCache grown = inverse_add(cache, extra, k);
  const InverseCache back = inverse_remove(grown, {0, 1, 2});
  CHECK((back.inv - cache.inv).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(back.logdet == doctest::Approx(cache.logdet).epsilon(1e-7));
}

TEST_CASE("property: add/remove agree with direct inversion across random instances") {
  Rng rng(53);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 20);
    const int kk = 1 + static_cast<int>(rng.uniform() * 5);
    CovKernel k{KernelFamily::exponential, 0.5 + rng.uniform(), 0.2 + 0.5 * rng.uniform(),
                0.0, 0.0};
    const LocationSet locs = random_sites(rng, n, 2.0);
    const LocationSet extra = random_sites(rng, kk, 2.0);
    const InverseCache cache = make_inverse_cache(locs, k);

    const InverseCache grown = inverse_add(cache, extra, k);
    const Matrix oracle =
        direct_inverse(cov_matrix(k, LocationSet::concat(extra, locs)));
    CHECK((grown.inv - oracle).cwiseAbs().maxCoeff() < 1e-8);

    std::vector<int> drop;
    for (int i = 0; i < kk; ++i) drop.push_back(i);
    const InverseCache back = inverse_remove(grown, drop);
    CHECK((back.inv - cache.inv).cwiseAbs().maxCoeff() < 1e-7);
  }
}
