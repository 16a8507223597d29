#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "rankbound/errors.hpp"
#include "rankbound/sdp.hpp"
#include "synthetic.hpp"

using namespace rankbound;

namespace {

SdpProblem scalar_problem(std::vector<std::pair<double, double>> lmis) {
  // min y s.t. c + a y >= 0 as 1x1 blocks.
  SdpProblem p;
  p.nvars = 1;
  p.objective = {{0, 1.0}};
  for (const auto& [c, a] : lmis) {
    AffineBlock b(1, "s");
    b.add_constant(0, 0, c);
    b.add_coefficient(0, 0, 0, a);
    p.blocks.push_back(b);
  }
  return p;
}

}  // namespace

TEST_CASE("minimize y subject to [[y]] psd") {
  const SdpSolution s = solve(scalar_problem({{0.0, 1.0}}));
  CHECK(s.status == SolveStatus::optimal);
  CHECK(std::abs(s.y[0]) < 1e-7);
}

TEST_CASE("two-sided scalar problem") {
  const SdpSolution s = solve(scalar_problem({{-1.5, 1.0}, {4.0, -1.0}}));
  CHECK(s.status == SolveStatus::optimal);
  CHECK(s.primal_objective == doctest::Approx(1.5).epsilon(1e-8));
}

TEST_CASE("infeasible and unbounded problems") {
  const SdpSolution inf = solve(scalar_problem({{-1.0, 1.0}, {0.0, -1.0}}));
  CHECK(inf.status == SolveStatus::infeasible);
  const SdpSolution unb = solve(scalar_problem({{0.0, -1.0}}));
  CHECK(unb.status == SolveStatus::unbounded);
}

TEST_CASE("ill-formed problems are rejected") {
  SdpProblem p = scalar_problem({{0.0, 1.0}});
  p.objective.clear();
  CHECK_THROWS_AS(solve(p), IllFormed);
  SdpProblem q = scalar_problem({{0.0, 1.0}});
  q.objective = {{3, 1.0}};
  CHECK_THROWS_AS(solve(q), IllFormed);
}

TEST_CASE("2x2 LMI with a known optimum") {
  // min y1 + y2 s.t. [[y1, 1], [1, y2]] psd  ->  2 at y1 = y2 = 1.
  SdpProblem p;
  p.nvars = 2;
  p.objective = {{0, 1.0}, {1, 1.0}};
  AffineBlock b(2, "b");
  b.add_constant(0, 1, 1.0);
  b.add_coefficient(0, 0, 0, 1.0);
  b.add_coefficient(1, 1, 1, 1.0);
  p.blocks.push_back(b);
  const SdpSolution s = solve(p);
  CHECK(s.status == SolveStatus::optimal);
  CHECK(s.primal_objective == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(s.y[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(s.primal_objective >= s.dual_objective - 1e-8 * (1 + std::abs(s.dual_objective)));
}

TEST_CASE("solver recovers planted optima") {
  std::mt19937 rng(99);
  int solved = 0;
  for (int rep = 0; rep < 120; ++rep) {
    const auto syn = testing::synthetic_sdp(rng);
    const SdpSolution s = solve(syn.problem);
    INFO("case " << rep << " status " << to_string(s.status) << " " << s.diagnostics);
    CHECK(s.status == SolveStatus::optimal);
    const double rel = std::abs(s.primal_objective - syn.optimum) / std::max(1.0, std::abs(syn.optimum));
    CHECK(rel < 1e-6);
    CHECK(s.max_psd_violation <= 1e-7);
    solved += s.status == SolveStatus::optimal && rel < 1e-6;
  }
  CHECK(solved == 120);
}

TEST_CASE("presolve agrees with the full KKT path under redundant equalities") {
  std::mt19937 rng(1234);
  std::normal_distribution<double> g(0.0, 1.0);
  int compared = 0;
  for (int rep = 0; rep < 100; ++rep) {
    auto syn = testing::synthetic_sdp(rng);
    SdpProblem& p = syn.problem;
    // Append combinations of existing rows, scaled so cancellation leaves rounding residue.
    const std::size_t base = p.eq_rows.size();
    for (std::size_t r = 0; r < base; ++r) {
      LinearRow comb;
      const double s1 = 1e3 * g(rng);
      const double s2 = base > 1 ? g(rng) : 0.0;
      std::map<int, double> acc;
      for (const auto& [v, c] : p.eq_rows[r].coeffs) acc[v] += s1 * c;
      for (const auto& [v, c] : p.eq_rows[(r + 1) % base].coeffs) acc[v] += s2 * c;
      comb.constant = s1 * p.eq_rows[r].constant + s2 * p.eq_rows[(r + 1) % base].constant;
      comb.coeffs.assign(acc.begin(), acc.end());
      p.eq_rows.push_back(comb);
    }
    SolverOptions on, off;
    off.presolve = false;
    const SdpSolution a = solve(p, on);
    const SdpSolution b = solve(p, off);
    INFO("case " << rep << " " << to_string(a.status) << " / " << to_string(b.status));
    REQUIRE(a.status == SolveStatus::optimal);
    CHECK(std::abs(a.primal_objective - syn.optimum) < 1e-6 * std::max(1.0, std::abs(syn.optimum)));
    CHECK(a.max_eq_residual < 1e-7);
    if (b.status == SolveStatus::optimal) {
      CHECK(std::abs(a.primal_objective - b.primal_objective) < 1e-6 * std::max(1.0, std::abs(syn.optimum)));
      ++compared;
    }
  }
  CHECK(compared >= 50);
}

TEST_CASE("solve is deterministic") {
  std::mt19937 rng(5);
  const auto syn = testing::synthetic_sdp(rng);
  const SdpSolution a = solve(syn.problem), b = solve(syn.problem);
  CHECK(a.y == b.y);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("measure_residuals reports violations") {
  SdpProblem p = scalar_problem({{0.0, 1.0}});
  LinearRow eq;
  eq.coeffs = {{0, 1.0}};
  eq.constant = -2.0;
  p.add_row(eq);
  SdpSolution s;
  s.y = {-1.0};
  measure_residuals(p, s);
  CHECK(s.max_psd_violation == doctest::Approx(1.0));
  CHECK(s.max_eq_residual == doctest::Approx(3.0));
}
