#include <cmath>
#include <random>

#include "doctest.h"
#include "rankbound/analysis.hpp"
#include "rankbound/errors.hpp"
#include "rankbound/hierarchies.hpp"
#include "rankbound/instances.hpp"

using namespace rankbound;

TEST_CASE("extract_moment_matrix on the level-one cpsd solution") {
  BoundRequest req;
  req.A = gen("A_alpha", {0.5}).values;
  req.t = 1;
  const auto built = build_cpsd(req);
  const SdpSolution sol = solve(built.problem);
  REQUIRE(sol.status == SolveStatus::optimal);
  const Eigen::MatrixXd M0 = extract_moment_matrix(sol, *built.table, 0);
  REQUIRE(M0.rows() == 1);
  CHECK(M0(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
  const Eigen::MatrixXd M1 = extract_moment_matrix(sol, *built.table, 1);
  REQUIRE(M1.rows() == 3);
  CHECK((M1.bottomRightCorner(2, 2) - req.A).norm() < 1e-12);
  const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M1).eigenvalues()(0);
  CHECK(lmin >= -1e-8);
}

TEST_CASE("unsolved solutions are rejected") {
  const MomentTable tab(1, 1, EquivalenceMode::commutative_mode());
  SdpSolution sol;
  sol.status = SolveStatus::max_iter;
  sol.y.assign(3, 0.0);
  CHECK_THROWS_AS(extract_moment_matrix(sol, tab, 1), NotSolved);
  CHECK_THROWS_AS(flatness(sol, tab), NotSolved);
}

TEST_CASE("flat optimum of the level-two cpsd instance") {
  BoundRequest req;
  req.A = gen("A_alpha", {0.5}).values;
  req.t = 2;
  const auto built = build_cpsd(req);
  const SdpSolution sol = solve(built.problem);
  REQUIRE(sol.status == SolveStatus::optimal);
  const FlatnessReport r = flatness(sol, *built.table, 1e-6);
  CHECK(r.flat());
  CHECK(r.rank() == 3);
  CHECK(r.entries[0].rank_lower == 3);
}

TEST_CASE("numeric_rank with zero threshold") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  m(0, 0) = 1;
  m(1, 1) = 2;
  CHECK(numeric_rank(m, 0.0) == 2);
  CHECK(numeric_rank(Eigen::MatrixXd::Zero(2, 2), 0.0) == 0);
}

TEST_CASE("trace evaluations have rank at most d^2") {
  std::mt19937 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 2);
    const int d = 1 + static_cast<int>(rng() % 2);
    const int t = 2;
    const MomentTable tab(n, t, EquivalenceMode::symmetric_tracial());
    std::vector<Eigen::MatrixXd> X;
    for (int i = 0; i < n; ++i) {
      Eigen::MatrixXd R(d, d);
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) R(a, b) = g(rng);
      }
      X.push_back(R * R.transpose());
    }
    std::vector<double> y(static_cast<std::size_t>(tab.num_variables()));
    for (int v = 0; v < tab.num_variables(); ++v) {
      const Word& w = tab.variable_word(v);
      Eigen::MatrixXd p = Eigen::MatrixXd::Identity(d, d);
      for (int i = 0; i < w.degree(); ++i) p *= X[static_cast<std::size_t>(w[i] - 1)];
      y[static_cast<std::size_t>(v)] = p.trace();
    }
    const FlatnessReport r = flatness_from_values(y, tab, 1e-9);
    CHECK(r.rank() <= d * d);
    for (const FlatnessEntry& e : r.entries) CHECK(e.rank_lower <= e.rank_t);
  }
}
