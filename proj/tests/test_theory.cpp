#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "pimsbo/bench.hpp"
#include "pimsbo/parallel.hpp"
#include "pimsbo/theory.hpp"
#include "test_util.hpp"

using namespace pimsbo;
using testutil::uniform_points;

namespace {

RunTrace repeated_trace(const Vector& x, Index steps) {
  RunTrace tr;
  tr.init_inputs = PointMatrix(0, x.size());
  tr.init_observations = Vector(0);
  for (Index t = 1; t <= steps; ++t) {
    StepRecord s;
    s.t = t;
    s.x = x;
    s.y = 0.1 * static_cast<double>(t);
    tr.steps.push_back(s);
  }
  return tr;
}

}  // namespace

TEST_CASE("information gain") {
  const KernelSpec k = KernelSpec::rbf(0.1);
  CHECK(info_gain(k, 1.0, PointMatrix(0, 2)) == 0.0);
  CHECK(info_gain(k, 1.0, PointMatrix::Constant(1, 2, 0.3)) == doctest::Approx(0.34657359027997264).epsilon(1e-14));
  PointMatrix far(2, 2);
  far << 0.0, 0.0, 50.0, 50.0;
  CHECK(std::abs(info_gain(k, 1.0, far) - 2.0 * 0.34657359027997264) < 1e-4);

  // Dense oracle: 1/2 log det(I + K / s).
  Rng rng = make_rng(1, {});
  const PointMatrix p = uniform_points(7, 3, rng);
  Matrix a = KernelSpec::matern(2.5, 0.4).gram(p) / 0.05;
  a.diagonal().array() += 1.0;
  CHECK(info_gain(KernelSpec::matern(2.5, 0.4), 0.05, p) ==
        doctest::Approx(0.5 * std::log(a.determinant())).epsilon(1e-11));
}

TEST_CASE("mig edge cases") {
  Rng rng = make_rng(2, {});
  const FiniteGrid grid(uniform_points(8, 2, rng));
  const KernelSpec k = KernelSpec::rbf(0.3);
  const double g1 = 0.5 * std::log1p(1.0 / 1e-2);
  CHECK(mig(k, 1e-2, grid, 1, MigMode::kExact).value == doctest::Approx(g1).epsilon(1e-13));
  CHECK(mig(k, 1e-2, grid, 1, MigMode::kGreedy).value == doctest::Approx(g1).epsilon(1e-13));
  const double whole = info_gain(k, 1e-2, grid.points());
  CHECK(mig(k, 1e-2, grid, 8, MigMode::kExact).value == doctest::Approx(whole).epsilon(1e-12));
  CHECK(mig(k, 1e-2, grid, 8, MigMode::kGreedy).value == doctest::Approx(whole).epsilon(1e-10));
  CHECK_THROWS(mig(k, 1e-2, grid, 9, MigMode::kGreedy));
  CHECK_THROWS(mig(k, 1e-2, grid, 0, MigMode::kGreedy));
  const FiniteGrid big(uniform_points(200, 2, rng));
  CHECK_THROWS(mig(k, 1e-2, big, 10, MigMode::kExact));
}

TEST_CASE("greedy value equals info gain of its subset") {
  Rng rng = make_rng(3, {});
  const FiniteGrid grid(uniform_points(30, 2, rng));
  const KernelSpec k = KernelSpec::matern(1.5, 0.2);
  const MigResult g = mig(k, 1e-3, grid, 6, MigMode::kGreedy);
  PointMatrix sub(6, 2);
  for (int i = 0; i < 6; ++i) sub.row(i) = grid.points().row(g.subset[static_cast<std::size_t>(i)]);
  CHECK(g.value == doctest::Approx(info_gain(k, 1e-3, sub)).epsilon(1e-10));
  CHECK(g.upper == doctest::Approx(g.value / (1.0 - std::exp(-1.0))));
}

TEST_CASE("property: greedy sandwich on tiny grids") {
  Rng rng = make_rng(4, {});
  std::uniform_real_distribution<double> l(0.05, 1.0), ln(-4.0, 0.0);
  for (Index card = 1; card <= 12; ++card) {
    for (Index T = 1; T <= std::min<Index>(4, card); ++T) {
      for (int rep = 0; rep < 4; ++rep) {
        const FiniteGrid grid(uniform_points(card, 2, rng));
        const KernelSpec k = rep % 2 ? KernelSpec::rbf(l(rng)) : KernelSpec::matern(2.5, l(rng));
        const double noise = std::pow(10.0, ln(rng));
        const double exact = mig(k, noise, grid, T, MigMode::kExact).value;
        const MigResult greedy = mig(k, noise, grid, T, MigMode::kGreedy);
        REQUIRE(greedy.value <= exact + 1e-10);
        REQUIRE(exact <= greedy.upper + 1e-10);
      }
    }
  }
}

TEST_CASE("variance-sum check") {
  const KernelSpec k = KernelSpec::rbf(0.2);
  const double noise = 1e-2;
  const double g1 = 0.5 * std::log1p(1.0 / noise);
  const Vector x = Vector::Constant(2, 0.5);

  RunTrace empty = repeated_trace(x, 0);
  CHECK(variance_sum_bound_check(empty, k, noise, g1).pass);

  const CheckReport one = variance_sum_bound_check(repeated_trace(x, 1), k, noise, g1);
  CHECK(one.empirical == doctest::Approx(1.0));
  CHECK(one.bound == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(one.pass);

  // Single point: sigma^2_{t-1} = s / (s + t - 1).
  const RunTrace tr = repeated_trace(x, 10);
  double expected = 0.0;
  for (int t = 1; t <= 10; ++t) expected += noise / (noise + t - 1);
  const FiniteGrid single(PointMatrix::Constant(1, 2, 0.5));
  const double gamma = info_gain(k, noise, PointMatrix::Constant(10, 2, 0.5));
  const CheckReport rep = variance_sum_bound_check(tr, k, noise, gamma);
  CHECK(rep.empirical == doctest::Approx(expected).epsilon(1e-10));
  CHECK(rep.pass);
  CHECK_FALSE(variance_sum_bound_check(tr, k, noise, gamma, 0.01).pass);
}

TEST_CASE("bound constants") {
  const BoundConstants b = BoundConstants::make(1e-6, 64);
  CHECK(b.c2 == doctest::Approx(8.931471805599454).epsilon(1e-14));
  CHECK(b.c1 == doctest::Approx(2.0 / std::log(1.0 + 1e6)).epsilon(1e-14));
  CHECK(BoundConstants::make(0.5, 2).c2 == 2.0);
  const double c1 = BoundConstants::make(0.1, 2).c1;
  CHECK(bcr_bound_finite(2, 7, 0.1, 3.0) == doctest::Approx(std::sqrt(2.0 * c1 * 7 * 3.0)));
  const double g1 = 0.5 * std::log1p(1.0 / 0.1);
  CHECK(bcr_bound_finite(40, 1, 0.1, g1) == doctest::Approx(std::sqrt(BoundConstants::make(0.1, 40).c2)));
}

TEST_CASE("gaussian tail") {
  CHECK(normal_survival(0.0) == 0.5);
  CHECK(normal_survival(1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-14));
  CHECK(normal_survival(5.0) == doctest::Approx(2.866515718791933e-07).epsilon(1e-12));
  const double c1[] = {1.0};
  CHECK(gauss_tail_check(c1).pass);
  CHECK(0.5 * std::exp(-0.5) == doctest::Approx(0.3032653298563167));
  CHECK(0.5 * std::exp(-12.5) == doctest::Approx(1.8633265860393355e-06));
  const double c0[] = {0.0};
  const CheckReport at_zero = gauss_tail_check(c0);
  CHECK(at_zero.empirical == 0.0);
  CHECK(at_zero.pass);
  std::vector<double> grid;
  for (int i = 0; i <= 1000; ++i) grid.push_back(0.01 * i);
  CHECK(gauss_tail_check(grid).pass);
  const double neg[] = {-0.1};
  CHECK_THROWS(gauss_tail_check(neg));
}

TEST_CASE("monte carlo eta and xi bound") {
  // Two far-apart prior points: eta = max of two independent normals, whose
  // E[M^2 1{M >= 0}] is 3/4 + 1/(2 pi).
  PointMatrix two(2, 2);
  two << 0.0, 0.0, 30.0, 30.0;
  const FiniteGrid grid(two);
  Rng rng = make_rng(5, {});
  const EtaBoundReport rep = mc_eta_bound(KernelSpec::rbf(0.2), grid, Dataset(2, 1e-6), 100000, rng);
  const double oracle = 0.75 + 0.5 / std::numbers::pi;
  CHECK(std::abs(rep.eta.empirical - oracle) <= 4.0 * rep.eta.stderr_);
  CHECK(rep.eta.bound == 2.0);
  CHECK(rep.eta.pass);
  CHECK(rep.xi.pass);
}

TEST_CASE("monte carlo verifier is independent of the thread count") {
  Rng r0 = make_rng(6, {});
  const FiniteGrid grid(uniform_points(16, 2, r0));
  const Dataset data(uniform_points(5, 2, r0), standard_normal_vector(5, r0), 1e-4);
  const int saved = kernels::max_threads();
  kernels::set_threads(1);
  Rng a = make_rng(7, {});
  const EtaBoundReport one = mc_eta_bound(KernelSpec::rbf(0.3), grid, data, 20000, a);
  kernels::set_threads(3);
  Rng b = make_rng(7, {});
  const EtaBoundReport three = mc_eta_bound(KernelSpec::rbf(0.3), grid, data, 20000, b);
  kernels::set_threads(saved);
  CHECK(one.eta.empirical == three.eta.empirical);
  CHECK(one.xi.empirical == three.xi.empirical);
  CHECK(one.xi.stderr_ == three.xi.stderr_);
}

TEST_CASE("discretization") {
  const Discretization one = build_discretization(Box{1.0, 1}, 1);
  CHECK(one.size() == 1);
  CHECK(one.nearest_index(Vector::Constant(1, 0.93)) == 0);
  const Discretization two = build_discretization(Box{1.0, 1}, 2);
  CHECK(two.nearest_index(Vector::Constant(1, 0.49)) == 0);
  CHECK(two.nearest_index(Vector::Constant(1, 0.5)) == 0);  // midpoint toward the smaller
  CHECK(two.nearest_index(Vector::Constant(1, 0.51)) == 1);
  CHECK(two.points()(1, 0) == 0.75);
  CHECK_THROWS(build_discretization(Box{1.0, 1}, 0));
}

TEST_CASE("property: discretization rounding error and idempotence") {
  Rng rng = make_rng(8, {});
  for (Index d = 1; d <= 3; ++d) {
    const Discretization disc = build_discretization(Box{2.0, d}, 7);
    const PointMatrix probes = uniform_points(2000, d, rng, 0.0, 2.0);
    double worst = 0.0;
    for (Index i = 0; i < probes.rows(); ++i) {
      const Vector x = probes.row(i).transpose();
      const Index j = disc.nearest_index(x);
      const double dist = (x - disc.points().row(j).transpose()).lpNorm<1>();
      worst = std::max(worst, dist);
      // Brute-force oracle over all lattice points.
      double best = std::numeric_limits<double>::infinity();
      for (Index k = 0; k < disc.size(); ++k)
        best = std::min(best, (x - disc.points().row(k).transpose()).lpNorm<1>());
      REQUIRE(dist <= best + 1e-12);
    }
    CHECK(worst <= disc.l1_error_bound());
    for (Index k = 0; k < disc.size(); ++k)
      REQUIRE(disc.nearest_index(disc.points().row(k).transpose()) == k);
  }
}

TEST_CASE("discretization sizes and constants") {
  CHECK(tau_ts(1, 1, 1.0, 1.0, 0.1, KernelSpec::linear()) == 1);
  // L = max(sqrt(2), sqrt(log 2) + sqrt(pi)/2) = 1.71878..., tau = ceil(2 L).
  CHECK(smoothness_constant(2, 1.0, 1.0, KernelSpec::rbf(1.0)) == doctest::Approx(1.7187815366104555).epsilon(1e-14));
  CHECK(tau_ts(1, 2, 1.0, 1.0, 1.0, KernelSpec::rbf(1.0)) == 4);
  CHECK(s_t_ts(1, 2, 1.0, 1.0, 1.0, KernelSpec::rbf(1.0)) ==
        doctest::Approx(2.0 - 2.0 * std::log(2.0) + 4.0 * std::log(4.0)));
  CHECK(m_t_pims(1, 1, 1.0, 1.0, 1.0, 1.0, 0) == doctest::Approx(0.6137056388801094).epsilon(1e-14));
  CHECK(m_t_pims(3, 2, 1.0, 1.0, 1.0, 1e-2, 4) > m_t_pims(3, 2, 1.0, 1.0, 1.0, 1e-2, 0));
  CHECK_THROWS(tau_ts(1, 2, 1.0, 0.5, 1.0, KernelSpec::rbf(1.0)));
}
