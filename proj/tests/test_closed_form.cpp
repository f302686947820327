#include <doctest.h>

#include <random>

#include "qot/closed_form.hpp"
#include "qot/primal.hpp"
#include "qot/solver.hpp"
#include "test_util.hpp"

using namespace qot;

TEST_CASE("full-support check on the delta pair") {
  const auto fx = testutil::delta_pair();
  const auto chk = full_support_check(fx.p, fx.q, 0.1);
  CHECK(chk.full_support);
  CHECK(chk.margin == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("full-support check on the symmetric two-point pair") {
  const auto fx = testutil::two_point_pair();
  const auto wide = full_support_check(fx.p, fx.q, 2.0);
  CHECK(wide.full_support);
  CHECK(wide.margin == doctest::Approx(1.0).epsilon(1e-15));

  const auto narrow = full_support_check(fx.p, fx.q, 0.5);
  CHECK_FALSE(narrow.full_support);
  CHECK(narrow.margin == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("explicit potentials on the delta pair") {
  const auto fx = testutil::delta_pair();
  const DualPair star = full_support_potentials(fx.p, fx.q, 0.1);
  // Raw values (0.05, 0.55); balancing moves them to (0.30, 0.30).
  CHECK(star.f[0] == doctest::Approx(0.30).epsilon(1e-15));
  CHECK(star.g[0] == doctest::Approx(0.30).epsilon(1e-15));
  CHECK(schrodinger_residual(star, fx.p, fx.q, fx.cost, 0.1) <= 1e-15);
}

TEST_CASE("explicit potentials at a single point give eps/2 and unit density") {
  const auto p = make_discrete_1d({0.0}, {1.0});
  const auto cost = cost_matrix(p, p);
  for (double eps : {0.05, 0.5, 3.0}) {
    const DualPair star = full_support_potentials(p, p, eps);
    CHECK(star.f[0] == doctest::Approx(eps / 2).epsilon(1e-15));
    CHECK(star.g[0] == doctest::Approx(eps / 2).epsilon(1e-15));
    const Coupling coup = coupling_density(star, p, p, cost, eps);
    CHECK(coup.density(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("explicit potentials on the two-point pair at eps=2") {
  const auto fx = testutil::two_point_pair();
  const DualPair star = full_support_potentials(fx.p, fx.q, 2.0);
  CHECK(star.f.isApproxToConstant(1.5, 1e-14));
  CHECK(star.g.isApproxToConstant(1.5, 1e-14));

  const Coupling coup = coupling_density(star, fx.p, fx.q, fx.cost, 2.0);
  CHECK(coup.density(0, 0) == doctest::Approx(1.5));
  CHECK(coup.density(0, 1) == doctest::Approx(0.5));
  CHECK(coup.density(1, 0) == doctest::Approx(0.5));
  CHECK(coup.density(1, 1) == doctest::Approx(1.5));
  const auto [rp, rq] = marginal_residual(coup, fx.p, fx.q);
  CHECK(rp <= 1e-15);
  CHECK(rq <= 1e-15);
}

TEST_CASE("potentials are refused outside the full-support regime") {
  const auto fx = testutil::two_point_pair();
  CHECK_THROWS_AS(full_support_potentials(fx.p, fx.q, 0.5),
                  std::invalid_argument);
}

TEST_CASE("gradient descent reproduces the closed form on random instances") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 4; ++trial) {
    const auto fx = testutil::random_instance(8, 11, 1 + trial % 2, rng);
    // Choose eps large enough for a comfortable margin.
    const auto base = full_support_check(fx.p, fx.q, 1e-9);
    const double eps = std::max(0.0, -base.margin) + 0.5;
    REQUIRE(full_support_check(fx.p, fx.q, eps).full_support);

    const DualPair star = full_support_potentials(fx.p, fx.q, eps);
    GdConfig cfg;
    cfg.epsilon = eps;
    cfg.eta = 0.9 * eps;
    cfg.tol = 1e-12;
    cfg.init = testutil::random_balanced(fx, rng);
    const auto res = solve(fx.p, fx.q, fx.cost, cfg);
    REQUIRE(res.trace.status == SolveStatus::converged);
    const DualPair diff{res.dual.f - star.f, res.dual.g - star.g};
    CHECK(weighted_norm(diff, fx.p, fx.q) <= 1e-8);
  }
}

TEST_CASE("positive margin is equivalent to a strictly positive density") {
  std::mt19937 rng(99);
  const auto fx = testutil::random_instance(6, 7, 2, rng);
  const auto base = full_support_check(fx.p, fx.q, 1e-9);

  const double eps_wide = std::max(0.0, -base.margin) + 0.25;
  const DualPair star = full_support_potentials(fx.p, fx.q, eps_wide);
  const Coupling coup = coupling_density(star, fx.p, fx.q, fx.cost, eps_wide);
  CHECK((coup.density.array() > 0.0).all());

  // Shrinking eps below the critical value must zero out some pair.
  const double eps_narrow = std::max(1e-6, -base.margin * 0.5);
  if (!full_support_check(fx.p, fx.q, eps_narrow).full_support) {
    GdConfig cfg;
    cfg.epsilon = eps_narrow;
    cfg.eta = 0.5 * eps_narrow;
    cfg.tol = 1e-11;
    const auto res = solve(fx.p, fx.q, fx.cost, cfg);
    REQUIRE(res.trace.status == SolveStatus::converged);
    const Coupling sparse =
        coupling_density(res.dual, fx.p, fx.q, fx.cost, eps_narrow);
    CHECK((sparse.density.array() == 0.0).any());
  }
}
