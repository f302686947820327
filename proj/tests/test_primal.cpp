#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "qot/closed_form.hpp"
#include "qot/primal.hpp"
#include "qot/solver.hpp"
#include "test_util.hpp"

using namespace qot;
using testutil::Fixture;

TEST_CASE("coupling density basics") {
  const auto p = make_discrete_1d({0.0}, {1.0});
  const auto c = cost_matrix(p, p);
  const double eps = 0.4;
  const DualPair star{Eigen::VectorXd::Constant(1, eps / 2),
                      Eigen::VectorXd::Constant(1, eps / 2)};
  CHECK(coupling_density(star, p, p, c, eps).density(0, 0) == doctest::Approx(1.0));

  const auto fx = testutil::delta_pair();
  const DualPair low{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};
  const Coupling zero = coupling_density(low, fx.p, fx.q, fx.cost, 0.1);
  CHECK(zero.density(0, 0) == 0.0);
  const auto [rp, rq] = marginal_residual(zero, fx.p, fx.q);
  CHECK(rp == doctest::Approx(1.0));
  CHECK(rq == doctest::Approx(1.0));
}

TEST_CASE("support fraction extremes") {
  const auto fx = testutil::two_point_pair();
  const DualPair star = full_support_potentials(fx.p, fx.q, 2.0);
  const Coupling full = coupling_density(star, fx.p, fx.q, fx.cost, 2.0);
  CHECK(support_fraction(full, fx.p, fx.q) == doctest::Approx(1.0));

  const DualPair low{Eigen::VectorXd::Constant(2, -1.0),
                     Eigen::VectorXd::Constant(2, -1.0)};
  const Coupling none = coupling_density(low, fx.p, fx.q, fx.cost, 2.0);
  CHECK(support_fraction(none, fx.p, fx.q) == 0.0);
}

TEST_CASE("support shrinks when the regularization drops") {
  const auto fx = testutil::exp1(0.02);
  double prev = 2.0;
  for (double eps : {0.1, 0.01}) {
    GdConfig cfg;
    cfg.epsilon = eps;
    cfg.eta = 0.5 * eps;
    cfg.tol = 1e-10;
    const auto res = solve(fx.p, fx.q, fx.cost, cfg);
    REQUIRE(res.trace.status == SolveStatus::converged);
    const Coupling coup = coupling_density(res.dual, fx.p, fx.q, fx.cost, eps);
    const double frac = support_fraction(coup, fx.p, fx.q);
    CHECK(frac < prev);
    prev = frac;
  }
}

TEST_CASE("primal objective closed values and strong duality") {
  SUBCASE("single point") {
    const auto p = make_discrete_1d({0.0}, {1.0});
    const auto c = cost_matrix(p, p);
    const double eps = 0.4;
    const DualPair star = full_support_potentials(p, p, eps);
    const Coupling coup = coupling_density(star, p, p, c, eps);
    CHECK(primal_objective(coup, p, p, c, eps) == doctest::Approx(eps / 2));
    CHECK(dual_objective(star, p, p, c, eps) == doctest::Approx(eps / 2));
  }

  SUBCASE("delta pair at eps = 0.1") {
    const auto fx = testutil::delta_pair();
    const DualPair star = full_support_potentials(fx.p, fx.q, 0.1);
    const Coupling coup = coupling_density(star, fx.p, fx.q, fx.cost, 0.1);
    CHECK(primal_objective(coup, fx.p, fx.q, fx.cost, 0.1) ==
          doctest::Approx(0.55).epsilon(1e-14));
    CHECK(dual_objective(star, fx.p, fx.q, fx.cost, 0.1) ==
          doctest::Approx(0.55).epsilon(1e-14));
  }

  SUBCASE("two-point pair at eps = 2") {
    const auto fx = testutil::two_point_pair();
    const DualPair star = full_support_potentials(fx.p, fx.q, 2.0);
    const Coupling coup = coupling_density(star, fx.p, fx.q, fx.cost, 2.0);
    CHECK(primal_objective(coup, fx.p, fx.q, fx.cost, 2.0) ==
          doctest::Approx(1.75).epsilon(1e-14));
    CHECK(dual_objective(star, fx.p, fx.q, fx.cost, 2.0) ==
          doctest::Approx(1.75).epsilon(1e-14));
  }

  SUBCASE("converged desk-scale instance") {
    const auto fx = testutil::exp1(0.02);
    GdConfig cfg;
    cfg.epsilon = 0.1;
    cfg.eta = 0.05;
    cfg.tol = 1e-10;
    const auto res = solve(fx.p, fx.q, fx.cost, cfg);
    REQUIRE(res.trace.status == SolveStatus::converged);
    const Coupling coup = coupling_density(res.dual, fx.p, fx.q, fx.cost, 0.1);
    const auto [rp, rq] = marginal_residual(coup, fx.p, fx.q);
    CHECK(rp <= 1e-8);
    CHECK(rq <= 1e-8);
    const double primal = primal_objective(coup, fx.p, fx.q, fx.cost, 0.1);
    const double dual = dual_objective(res.dual, fx.p, fx.q, fx.cost, 0.1);
    CHECK(std::abs(primal - dual) <= 1e-8 * (1.0 + std::abs(dual)));
  }
}

namespace {

// Brute-force oracle for 2x2 instances: couplings with fixed marginals form
// a one-parameter family pi11 = t; enumerate t on a 1e-3 grid of its
// feasible interval and return the best objective value found.
double oracle_2x2(const Fixture& fx, double eps) {
  const double p1 = fx.p.weights()[0], p2 = fx.p.weights()[1];
  const double q1 = fx.q.weights()[0], q2 = fx.q.weights()[1];
  const double lo = std::max(0.0, p1 + q1 - 1.0);
  const double hi = std::min(p1, q1);
  double best = std::numeric_limits<double>::infinity();
  const long steps = 1000;
  for (long k = 0; k <= steps; ++k) {
    const double t = lo + (hi - lo) * static_cast<double>(k) / steps;
    const double pi[2][2] = {{t, p1 - t}, {q1 - t, p2 - (q1 - t)}};
    double value = 0.0;
    const double w[2] = {p1, p2};
    const double v[2] = {q1, q2};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double dens = pi[i][j] / (w[i] * v[j]);
        value += pi[i][j] * fx.cost.c()(i, j) + 0.5 * eps * w[i] * v[j] * dens * dens;
      }
    best = std::min(best, value);
  }
  return best;
}

Fixture asymmetric_2x2() {
  auto p = make_discrete_1d({0.0, 1.0}, {0.3, 0.7});
  auto q = make_discrete_1d({0.25, 1.25}, {0.6, 0.4});
  auto cost = cost_matrix(p, q);
  return {std::move(p), std::move(q), std::move(cost)};
}

}  // namespace

TEST_CASE("recovered coupling beats the 2x2 enumeration oracle") {
  struct Case {
    Fixture fx;
    double eps;
  };
  std::vector<Case> cases;
  cases.push_back({testutil::two_point_pair(), 2.0});
  cases.push_back({testutil::two_point_pair(), 0.5});
  cases.push_back({asymmetric_2x2(), 0.3});

  for (auto& [fx, eps] : cases) {
    DualPair star{Eigen::VectorXd(), Eigen::VectorXd()};
    if (full_support_check(fx.p, fx.q, eps).full_support) {
      star = full_support_potentials(fx.p, fx.q, eps);
    } else {
      GdConfig cfg;
      cfg.epsilon = eps;
      cfg.eta = 0.5 * eps;
      cfg.tol = 1e-12;
      const auto res = solve(fx.p, fx.q, fx.cost, cfg);
      REQUIRE(res.trace.status == SolveStatus::converged);
      star = res.dual;
    }
    const Coupling coup = coupling_density(star, fx.p, fx.q, fx.cost, eps);
    const double mine = primal_objective(coup, fx.p, fx.q, fx.cost, eps);
    CHECK(mine <= oracle_2x2(fx, eps) + 1e-9);
  }
}

TEST_CASE("equal marginals concentrate on the diagonal as eps shrinks") {
  auto p = trapezoid_grid(0.0, 1.0, 0.02, uniform_density(0.0, 1.0));
  auto cost = cost_matrix(p, p);
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {0.3, 0.1, 0.03}) {
    GdConfig cfg;
    cfg.epsilon = eps;
    cfg.eta = 0.5 * eps;
    cfg.tol = 1e-10;
    const auto res = solve(p, p, cost, cfg);
    REQUIRE(res.trace.status == SolveStatus::converged);
    const Coupling coup = coupling_density(res.dual, p, p, cost, eps);
    const double spread = max_support_displacement(coup, p, p);
    CHECK(spread < prev);
    prev = spread;
  }
}

TEST_CASE("coupling exports") {
  const auto fx = testutil::two_point_pair();
  const DualPair star = full_support_potentials(fx.p, fx.q, 2.0);
  const Coupling coup = coupling_density(star, fx.p, fx.q, fx.cost, 2.0);

  const auto dir = std::filesystem::temp_directory_path() / "qot_coupling";
  std::filesystem::create_directories(dir);
  export_coupling_dense(coup, (dir / "dense.csv").string());
  export_coupling_sparse(coup, fx.p, fx.q, (dir / "sparse.csv").string());

  std::ifstream dense(dir / "dense.csv");
  std::string line;
  std::getline(dense, line);
  CHECK(line == "i,j0,j1");
  std::getline(dense, line);
  CHECK(line == "0,1.5,0.5");

  std::ifstream sparse(dir / "sparse.csv");
  std::getline(sparse, line);
  CHECK(line == "i,j,x1,y1,density");
  long rows = 0;
  while (std::getline(sparse, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 4);  // all four pairs are active at eps = 2
}
