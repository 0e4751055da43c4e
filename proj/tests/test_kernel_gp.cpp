#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "pimsbo/gp.hpp"
#include "pimsbo/sampling.hpp"
#include "test_util.hpp"

using namespace pimsbo;
using testutil::uniform_points;

namespace {
Vector v2(double a, double b) {
  Vector x(2);
  x << a, b;
  return x;
}
Dataset random_dataset(const KernelSpec& k, Index n, Index d, Rng& rng) {
  std::uniform_real_distribution<double> log_noise(-6.0, 0.0);
  const double noise = std::pow(10.0, log_noise(rng));
  const PointMatrix x = k.stationary() ? uniform_points(n, d, rng) : testutil::sphere_points(n, d, rng);
  return Dataset(x, standard_normal_vector(n, rng), noise);
}
}  // namespace

TEST_CASE("kernel values") {
  const KernelSpec rbf = KernelSpec::rbf(1.0);
  CHECK(kernel_eval(rbf, v2(0.3, 0.4), v2(0.3, 0.4)) == 1.0);
  CHECK(kernel_eval(rbf, v2(0, 0), v2(1, 0)) == doctest::Approx(0.6065306597126334).epsilon(1e-14));
  CHECK(kernel_eval(KernelSpec::linear(), v2(1, 0), v2(0, 1)) == 0.0);
  CHECK(kernel_eval(KernelSpec::matern(2.5, 1.0), v2(0, 0), v2(0, 1)) ==
        doctest::Approx(0.5239941088318203).epsilon(1e-13));
  CHECK(kernel_eval(KernelSpec::matern(1.5, 1.0), v2(0, 0), v2(1, 0)) ==
        doctest::Approx(0.4833577245965077).epsilon(1e-13));
  CHECK(kernel_eval(KernelSpec::matern(1.5, 0.3), v2(0.2, 0.2), v2(0.2, 0.2)) == 1.0);
}

TEST_CASE("kernel rejects bad input") {
  CHECK_THROWS(KernelSpec::rbf(0.0));
  CHECK_THROWS(KernelSpec::rbf(-1.0));
  CHECK_THROWS(kernel_eval(KernelSpec::matern(0.5, 1.0), v2(0, 0), v2(0, 1)));
  Vector three(3);
  three.setZero();
  CHECK_THROWS(kernel_eval(KernelSpec::rbf(1.0), v2(0, 0), three));
  CHECK_THROWS(kernel_eval(KernelSpec::rbf(1.0), v2(0, NAN), v2(0, 0)));
  CHECK_THROWS(parse_kernel_family("cosine"));
  CHECK(parse_kernel_family("matern") == KernelFamily::kMatern);
}

TEST_CASE("posterior of empty dataset is the prior") {
  const GpPosterior post = GpPosterior::fit(KernelSpec::rbf(0.2), Dataset(2, 1e-6));
  Rng rng = make_rng(1, {});
  const PointMatrix q = uniform_points(20, 2, rng);
  for (Index i = 0; i < q.rows(); ++i) {
    const MeanVar mv = post.mean_var(q.row(i).transpose());
    CHECK(mv.mean == 0.0);
    CHECK(mv.var == 1.0);
  }
}

TEST_CASE("single observation posterior") {
  Dataset data(2, 1.0);
  data.add(v2(0.5, 0.5), 1.0);
  const GpPosterior post = GpPosterior::fit(KernelSpec::rbf(1.0), data);
  const MeanVar mv = post.mean_var(v2(0.5, 0.5));
  CHECK(mv.mean == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mv.var == doctest::Approx(0.5).epsilon(1e-14));
  const MeanVar far = post.mean_var(v2(20.0, 20.0));
  CHECK(std::abs(far.mean) < 1e-6);
  CHECK(std::abs(far.var - 1.0) < 1e-6);
}

TEST_CASE("duplicated rows still factor") {
  Dataset data(2, 1e-6);
  for (int i = 0; i < 5; ++i) data.add(v2(0.1, 0.2), 0.3);
  const GpPosterior post = GpPosterior::fit(KernelSpec::rbf(0.2), data);
  const MeanVar mv = post.mean_var(v2(0.1, 0.2));
  CHECK(mv.mean == doctest::Approx(0.3).epsilon(1e-5));
  CHECK(mv.var >= 0.0);
}

TEST_CASE("dataset validation") {
  CHECK_THROWS(Dataset(2, 0.0));
  CHECK_THROWS(Dataset(2, -1.0));
  Dataset data(2, 1e-6);
  CHECK_THROWS(data.add(Vector::Zero(3), 0.0));
  CHECK_THROWS(data.add(v2(0, 0), NAN));
}

TEST_CASE("variance clamp") {
  CHECK(clamp_variance(0.25) == 0.25);
  CHECK(clamp_variance(-1e-13) == 0.0);
  CHECK_THROWS_AS(clamp_variance(-1e-9), NumericalError);
}

TEST_CASE("log marginal likelihood") {
  const KernelSpec k = KernelSpec::rbf(1.0);
  CHECK(log_marginal_likelihood(k, Dataset(2, 1.0)) == 0.0);
  Dataset one(2, 1.0);
  one.add(v2(0, 0), 0.0);
  CHECK(log_marginal_likelihood(k, one) == doctest::Approx(-1.2655121234846454).epsilon(1e-14));

  // Dense oracle: log N(y; 0, K + s I).
  Rng rng = make_rng(2, {});
  const Dataset data(uniform_points(12, 2, rng), standard_normal_vector(12, rng), 0.05);
  const KernelSpec m = KernelSpec::matern(1.5, 0.4);
  Matrix K = m.gram(data.inputs());
  K.diagonal().array() += 0.05;
  const Eigen::FullPivLU<Matrix> lu(K);
  const double expected = -0.5 * data.observations().dot(lu.solve(data.observations())) -
                           0.5 * std::log(lu.determinant()) - 6.0 * std::log(2.0 * std::numbers::pi);
  CHECK(log_marginal_likelihood(m, data) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("lengthscale grid search") {
  Rng rng = make_rng(3, {});
  const Dataset data(uniform_points(10, 2, rng), standard_normal_vector(10, rng), 1e-6);
  const std::vector<double> single = {0.7};
  CHECK(fit_lengthscale(KernelSpec::rbf(0.2), data, single).lengthscale() == 0.7);

  // With one observation the likelihood does not depend on the lengthscale.
  Dataset one(2, 1e-6);
  one.add(v2(0.5, 0.5), 0.0);
  const std::vector<double> cands = {1.0, 0.05, 0.2};
  CHECK(fit_lengthscale(KernelSpec::rbf(0.5), one, cands).lengthscale() == 0.05);
  const std::vector<double> empty;
  CHECK_THROWS(fit_lengthscale(KernelSpec::rbf(0.5), one, empty));
}

TEST_CASE("lengthscale recovery over replications") {
  const std::vector<double> cands = {0.05, 0.2, 1.0};
  int hits = 0;
  for (std::uint64_t rep = 0; rep < 50; ++rep) {
    Rng rng = make_rng(4, {rep});
    const PointMatrix x = uniform_points(50, 2, rng);
    const GpPosterior prior = GpPosterior::fit(KernelSpec::rbf(0.2), Dataset(2, 1e-6));
    Vector y = ExactGridSampler(prior, x).draw(rng);
    y += 1e-3 * standard_normal_vector(50, rng);
    const Dataset data(x, y, 1e-6);
    if (fit_lengthscale(KernelSpec::rbf(1.0), data, cands).lengthscale() == 0.2) ++hits;
  }
  CHECK(hits >= 40);
}

TEST_CASE("lipschitz constants and variance floor") {
  CHECK(lipschitz_sigma(KernelSpec::linear()) == 1.0);
  CHECK(lipschitz_sigma(KernelSpec::rbf(1.0)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(lipschitz_sigma(KernelSpec::matern(2.5, 1.0)) == doctest::Approx(1.8257418583505538).epsilon(1e-14));
  CHECK(posterior_var_floor(0.3, 0) == 1.0);
  CHECK(posterior_var_floor(1.0, 1) == 0.5);
  CHECK(posterior_var_floor(1.0, 3) == 0.25);
  CHECK_THROWS(posterior_var_floor(0.0, 1));
}

TEST_CASE("property: posterior variance floor") {
  Rng rng = make_rng(5, {});
  std::uniform_int_distribution<Index> num(0, 20);
  for (int inst = 0; inst < 1000; ++inst) {
    const KernelSpec k = testutil::random_kernel(inst, rng);
    const Dataset data = random_dataset(k, num(rng), 2, rng);
    const GpPosterior post = GpPosterior::fit(k, data);
    const PointMatrix q = k.stationary() ? uniform_points(100, 2, rng) : testutil::sphere_points(100, 2, rng);
    const PosteriorMoments m = post.moments(q);
    const double floor = posterior_var_floor(data.noise_var(), data.size());
    REQUIRE(m.var.minCoeff() >= floor - 1e-9);
  }
}

TEST_CASE("property: monotone information") {
  Rng rng = make_rng(6, {});
  for (int inst = 0; inst < 300; ++inst) {
    const KernelSpec k = testutil::random_kernel(inst, rng);
    const Dataset data = random_dataset(k, 1 + inst % 10, 2, rng);
    const GpPosterior post = GpPosterior::fit(k, data);
    const PointMatrix extra = k.stationary() ? uniform_points(1, 2, rng) : testutil::sphere_points(1, 2, rng);
    const GpPosterior more = post.with_observation(extra.row(0).transpose(), 0.1);
    const PointMatrix q = k.stationary() ? uniform_points(50, 2, rng) : testutil::sphere_points(50, 2, rng);
    const Vector before = post.moments(q).var;
    const Vector after = more.moments(q).var;
    REQUIRE((after.array() <= before.array() + 1e-9).all());
  }
}

TEST_CASE("property: empirical lipschitz of the posterior std") {
  Rng rng = make_rng(7, {});
  for (int family = 0; family < 3; ++family) {
    for (int inst = 0; inst < 10; ++inst) {
      const KernelSpec k = testutil::random_kernel(family, rng);
      const Dataset data = random_dataset(k, 8, 2, rng);
      const GpPosterior post = GpPosterior::fit(k, data);
      const double L = lipschitz_sigma(k);
      for (int pair = 0; pair < 100; ++pair) {
        const PointMatrix x = k.stationary() ? uniform_points(2, 2, rng) : testutil::sphere_points(2, 2, rng);
        // Close pairs as well as far ones.
        Vector a = x.row(0).transpose();
        Vector b = pair % 2 ? Vector(a + 1e-3 * (x.row(1).transpose() - a)) : Vector(x.row(1).transpose());
        const double sa = std::sqrt(post.mean_var(a).var);
        const double sb = std::sqrt(post.mean_var(b).var);
        REQUIRE(std::abs(sa - sb) <= L * (a - b).lpNorm<1>() + 1e-9);
      }
    }
  }
}

TEST_CASE("property: agreement with a dense solve") {
  Rng rng = make_rng(8, {});
  for (int inst = 0; inst < 100; ++inst) {
    const KernelSpec k = testutil::random_kernel(inst, rng);
    Dataset data(uniform_points(1 + inst % 15, 3, rng), standard_normal_vector(1 + inst % 15, rng), 0.01);
    const GpPosterior post = GpPosterior::fit(k, data);
    const PointMatrix q = uniform_points(10, 3, rng);
    const PosteriorMoments m = post.moments(q);
    for (Index i = 0; i < q.rows(); ++i) {
      const MeanVar ref = testutil::dense_moments(k, data, q.row(i).transpose());
      REQUIRE(m.mean(i) == doctest::Approx(ref.mean).epsilon(1e-8).scale(1.0));
      REQUIRE(m.var(i) == doctest::Approx(ref.var).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("posterior covariance diagonal matches variances") {
  Rng rng = make_rng(9, {});
  const Dataset data(uniform_points(6, 2, rng), standard_normal_vector(6, rng), 1e-4);
  const GpPosterior post = GpPosterior::fit(KernelSpec::rbf(0.3), data);
  const PointMatrix q = uniform_points(15, 2, rng);
  const Matrix c = post.covariance(q);
  const PosteriorMoments m = post.moments(q);
  CHECK((c.diagonal() - m.var).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((c - c.transpose()).cwiseAbs().maxCoeff() < 1e-14);
}
