#include "doctest.h"

#include <cmath>
#include <limits>

#include "pimsbo/acquisition.hpp"
#include "test_util.hpp"

using namespace pimsbo;
using testutil::uniform_points;

namespace {

PosteriorMoments moments_of(std::initializer_list<double> mean, std::initializer_list<double> sd) {
  PosteriorMoments m;
  m.mean = Eigen::Map<const Vector>(mean.begin(), static_cast<Index>(mean.size()));
  m.var = Eigen::Map<const Vector>(sd.begin(), static_cast<Index>(sd.size())).array().square();
  return m;
}

PosteriorMoments prior_moments(Index n) { return {Vector::Zero(n), Vector::Ones(n)}; }

Vector vec(std::initializer_list<double> v) {
  return Eigen::Map<const Vector>(v.begin(), static_cast<Index>(v.size()));
}

struct Instance {
  PosteriorMoments m;
  double g_star;
};

Instance random_instance(Rng& rng) {
  std::uniform_int_distribution<Index> size(1, 40);
  std::uniform_int_distribution<Index> nobs(0, 10);
  std::uniform_real_distribution<double> l(0.1, 1.0);
  const FiniteGrid grid(uniform_points(size(rng), 2, rng));
  const Index n = nobs(rng);
  const Dataset data(uniform_points(n, 2, rng), standard_normal_vector(n, rng), 1e-4);
  const GpPosterior post = GpPosterior::fit(KernelSpec::rbf(l(rng)), data);
  Instance inst{post.moments(grid.points()), 0.0};
  inst.g_star = ExactGridSampler(post, grid.points()).draw(rng).maxCoeff();
  return inst;
}

}  // namespace

TEST_CASE("argmax and argmin break ties toward the lowest index") {
  CHECK(argmax_lowest(vec({1, 3, 3, 2})) == 1);
  CHECK(argmin_lowest(vec({2, 0, 5, 0})) == 1);
  CHECK(argmax_lowest(vec({0.5, 0.5, 0.5})) == 0);
  CHECK_THROWS(argmax_lowest(Vector()));
}

TEST_CASE("thompson sampling") {
  const PosteriorMoments m = prior_moments(3);
  const AcquisitionRecord r = select_ts(m, vec({0.1, 0.9, 0.3}));
  CHECK(r.chosen == 1);
  CHECK(r.confidence == doctest::Approx(0.9));
  CHECK(select_ts(m, vec({0.2, 0.2, 0.2})).chosen == 0);
  CHECK_THROWS(select_ts(m, vec({0.2, 0.2})));

  const PosteriorMoments m2 = moments_of({0.5, 0.0}, {0.5, 1.0});
  const AcquisitionRecord r2 = select_ts(m2, vec({1.5, 0.9}));
  CHECK(r2.chosen == 0);
  CHECK(r2.confidence == doctest::Approx(2.0));  // (1.5 - 0.5) / 0.5
  CHECK(r2.posterior_std_at_choice == doctest::Approx(0.5));
}

TEST_CASE("pims") {
  const PosteriorMoments m = prior_moments(4);
  const AcquisitionRecord r = select_pims(m, vec({0.3, 1.2, -0.4, 0.1}));
  CHECK(r.chosen == 0);
  CHECK(r.confidence == doctest::Approx(1.2));
  REQUIRE(r.g_star.has_value());
  CHECK(*r.g_star == doctest::Approx(1.2));

  // g_star equals the mean at a unique maximizer of mu, equal sigma.
  const PosteriorMoments m2 = moments_of({0.2, 0.8, 0.5}, {0.3, 0.3, 0.3});
  const AcquisitionRecord r2 = select_pims(m2, vec({0.8, 0.1, 0.0}));
  CHECK(r2.chosen == 1);
  CHECK(r2.confidence == doctest::Approx(0.0));
}

TEST_CASE("gp-ucb") {
  const PosteriorMoments m = moments_of({0.0, 0.5}, {1.0, 0.1});
  const AcquisitionRecord r = select_gp_ucb(m, 1.0);
  CHECK(r.chosen == 0);
  CHECK(r.score == doctest::Approx(1.0));
  CHECK(select_gp_ucb(m, 0.0).chosen == 1);
  CHECK(select_gp_ucb(prior_moments(5), 2.0).chosen == 0);
  CHECK_THROWS(select_gp_ucb(m, -1.0));
  CHECK(select_irgp_ucb(m, 4.0).confidence == doctest::Approx(2.0));
}

TEST_CASE("beta schedules") {
  CHECK(beta_theoretical(10000, 1) == doctest::Approx(16.58280367754302).epsilon(1e-13));
  CHECK(beta_theoretical(1, 1) == 0.0);
  CHECK(beta_heuristic(4, 1) == doctest::Approx(0.5545177444479562).epsilon(1e-14));
  CHECK(beta_heuristic(1, 1) == doctest::Approx(0.13862943611198905).epsilon(1e-14));
  CHECK_THROWS(beta_heuristic(0, 1));
  CHECK_THROWS(beta_theoretical(10, 0));
}

TEST_CASE("shifted exponential draws") {
  Rng rng = make_rng(1, {});
  double sum = 0.0;
  double lowest = std::numeric_limits<double>::infinity();
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double z = draw_zeta(0.0, kZetaRate, rng);
    sum += z;
    lowest = std::min(lowest, z);
  }
  CHECK(std::abs(sum / n - 2.0) < 0.01);
  CHECK(lowest >= 0.0);
  for (int i = 0; i < 1000; ++i) CHECK(draw_zeta(3.0, kZetaRate, rng) >= 3.0);
  CHECK(zeta_shift_theoretical(2) == 0.0);
  CHECK(zeta_shift_heuristic(4) == 0.5);
  CHECK_THROWS(draw_zeta(0.0, 0.0, rng));
}

TEST_CASE("expected improvement and classic pi") {
  const AcquisitionRecord r = select_ei(prior_moments(3), 0.0);
  CHECK(r.chosen == 0);
  CHECK(r.score == doctest::Approx(0.3989422804014327).epsilon(1e-14));
  CHECK(std::isnan(r.confidence));

  const PosteriorMoments m = moments_of({0.5, 0.0}, {0.1, 1e-12});
  CHECK(select_ei(m, 0.4).score == doctest::Approx(0.10833154705876862).epsilon(1e-12));
  const PosteriorMoments tiny = moments_of({0.1}, {1e-9});
  CHECK(select_ei(tiny, 0.4).score < 1e-12);

  CHECK(select_pi_classic(prior_moments(4), 0.3).chosen == 0);
  const PosteriorMoments m2 = moments_of({0.0, 0.9, 0.2}, {1.0, 0.1, 1.0});
  CHECK(select_pi_classic(m2, 1.0).chosen == 2);  // gaps 1.0, 1.0, 0.8
}

TEST_CASE("equivalence on fixed cases") {
  const EquivalenceReport p = verify_equivalence(prior_moments(6), 1.0);
  CHECK(p.xi == doctest::Approx(1.0));
  CHECK(p.max_ucb == doctest::Approx(1.0));
  CHECK(p.pims_set.size() == 6);
  CHECK(p.scores_agree);

  const PosteriorMoments one = moments_of({0.3}, {0.5});
  const EquivalenceReport s = verify_equivalence(one, 1.3);
  CHECK(s.xi == doctest::Approx(2.0));
  CHECK(s.pims_choice == 0);
  CHECK(s.ucb_choice == 0);
  CHECK(s.scores_agree);
}

TEST_CASE("property: pims equals ucb with beta^1/2 = xi") {
  Rng rng = make_rng(2, {});
  for (int k = 0; k < 1000; ++k) {
    const Instance inst = random_instance(rng);
    const EquivalenceReport eq = verify_equivalence(inst.m, inst.g_star);
    REQUIRE(std::abs(eq.max_ucb - inst.g_star) <= 1e-8);
    REQUIRE(eq.pims_set == eq.ucb_set);
    REQUIRE(eq.scores_agree);
    REQUIRE(eq.pims_choice == select_pims(inst.m, Vector::Constant(inst.m.size(), inst.g_star)).chosen);
  }
}

TEST_CASE("property: shift invariance and tie determinism") {
  Rng rng = make_rng(3, {});
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  for (int k = 0; k < 300; ++k) {
    const Instance inst = random_instance(rng);
    const Vector path = Vector::Constant(inst.m.size(), inst.g_star);
    const AcquisitionRecord base = select_pims(inst.m, path);
    const double c = shift(rng);
    PosteriorMoments moved = inst.m;
    moved.mean.array() += c;
    const AcquisitionRecord shifted = select_pims(moved, Vector(path.array() + c));
    REQUIRE(shifted.chosen == base.chosen);
    REQUIRE(select_pims(inst.m, path) == base);
  }
}

TEST_CASE("property: sign of xi") {
  Rng rng = make_rng(4, {});
  std::normal_distribution<double> offset(0.0, 0.5);
  for (int k = 0; k < 500; ++k) {
    Instance inst = random_instance(rng);
    const double max_mu = inst.m.mean.maxCoeff();
    const double g = max_mu + offset(rng);
    const double xi = select_pims(inst.m, Vector::Constant(inst.m.size(), g)).confidence;
    if (g >= max_mu) {
      REQUIRE(xi >= 0.0);
    } else {
      REQUIRE(xi < 0.0);
    }
  }
}

TEST_CASE("property: pathwise tail identity") {
  Rng rng = make_rng(5, {});
  for (int k = 0; k < 500; ++k) {
    const Instance inst = random_instance(rng);
    const double xi = verify_equivalence(inst.m, inst.g_star).xi;
    for (double c : {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0}) {
      const double ucb = (inst.m.mean + c * inst.m.stddev()).maxCoeff();
      REQUIRE((xi > c) == (inst.g_star > ucb));
    }
  }
}
