#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "rankbound/errors.hpp"
#include "rankbound/hierarchies.hpp"
#include "rankbound/instances.hpp"
#include "rankbound/sdpa_io.hpp"
#include "synthetic.hpp"

using namespace rankbound;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

SdpProblem toy() {
  SdpProblem p;
  p.nvars = 1;
  p.objective = {{0, 1.0}};
  AffineBlock b(1, "b");
  b.add_coefficient(0, 0, 0, 1.0);
  p.blocks.push_back(b);
  return p;
}

}  // namespace

TEST_CASE("toy export is five lines") {
  const std::string s = export_sdpa(toy());
  CHECK(s == "1\n1\n1\n1\n1 1 1 1 1\n");
  CHECK(lines(s).size() == 5);
}

TEST_CASE("block sizes of the level-one cpsd instance") {
  BoundRequest req;
  req.A = gen("A_alpha", {0.5}).values;
  req.t = 1;
  const auto built = build_cpsd(req);
  const auto l = lines(export_sdpa(built.problem));
  CHECK(l[1] == "3");
  CHECK(l[2] == "3 1 1");
}

TEST_CASE("numbers use 17 significant digits and signs follow F0 = -C") {
  SdpProblem p = toy();
  p.blocks[0].add_constant(0, 0, 1.0 / 3.0);
  const auto l = lines(export_sdpa(p));
  CHECK(l[4] == "0 1 1 1 -0.33333333333333331");
}

TEST_CASE("export, import, export is byte-identical") {
  std::mt19937 rng(17);
  for (int rep = 0; rep < 100; ++rep) {
    const auto syn = testing::synthetic_sdp(rng);
    for (bool ext : {false, true}) {
      const std::string a = export_sdpa(syn.problem, {ext});
      const SdpProblem q = import_sdpa(a);
      CHECK(export_sdpa(q, {ext}) == a);
      if (ext) {
        CHECK(q.eq_rows.size() == syn.problem.eq_rows.size());
      } else {
        CHECK(q.eq_rows.empty());
      }
    }
  }
}

TEST_CASE("round trip preserves the solved optimum") {
  std::mt19937 rng(23);
  for (int rep = 0; rep < 100; ++rep) {
    const auto syn = testing::synthetic_sdp(rng);
    const SdpSolution a = solve(syn.problem);
    const SdpSolution b = solve(import_sdpa(export_sdpa(syn.problem, {true})));
    REQUIRE(a.status == SolveStatus::optimal);
    REQUIRE(b.status == SolveStatus::optimal);
    CHECK(std::abs(a.primal_objective - b.primal_objective) <= 1e-9 * (1 + std::abs(a.primal_objective)));
  }
}

TEST_CASE("round trip of a hierarchy instance") {
  BoundRequest req;
  req.A = gen("A_alpha", {0.5}).values;
  req.t = 2;
  req.variants.kernel = true;
  const auto built = build_cpsd(req);
  const SdpSolution a = solve(built.problem);
  const SdpSolution b = solve(import_sdpa(export_sdpa(built.problem, {true})));
  CHECK(a.status == SolveStatus::optimal);
  CHECK(std::abs(a.primal_objective - b.primal_objective) <= 1e-9);
}

TEST_CASE("objective constant and equality block comments") {
  SdpProblem p = toy();
  p.objective_constant = 2.5;
  LinearRow r;
  r.coeffs = {{0, 1.0}};
  r.constant = -1.0;
  p.add_row(r);
  const std::string s = export_sdpa(p, {true});
  CHECK(s.rfind("*objective_constant 2.5\n*equalities 2\n", 0) == 0);
  const SdpProblem q = import_sdpa(s);
  CHECK(q.objective_constant == 2.5);
  REQUIRE(q.eq_rows.size() == 1);
  CHECK(q.eq_rows[0].constant == -1.0);
}

TEST_CASE("ordinary SDPA syntax is accepted") {
  const std::string s =
      "\"a comment\n"
      "2 =mDIM\n"
      "1\n"
      "{2}\n"
      "{1, 1}\n"
      "0 1 1 2 -1\n"
      "1 1 1 1 1\n"
      "2 1 2 2 1\n";
  const SdpProblem p = import_sdpa(s);
  const SdpSolution sol = solve(p);
  CHECK(sol.status == SolveStatus::optimal);
  CHECK(sol.primal_objective == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("malformed SDPA input") {
  CHECK_THROWS_AS(import_sdpa(""), ParseError);
  CHECK_THROWS_AS(import_sdpa("1\n1\n1\n1\n1 2 1 1 1\n"), ParseError);
  CHECK_THROWS_AS(import_sdpa("1\n1\n1\n1\n1 1 1 2 1\n"), ParseError);
  CHECK_THROWS_AS(import_sdpa("1\n1\n-2\n1\n1 1 1 2 1\n"), ParseError);
  CHECK_THROWS_AS(import_sdpa("1\n1\n1\n1\n1 1 1 1 abc\n"), ParseError);
  CHECK_THROWS_AS(import_sdpa("1\n1\n1\n1\n1 1 1\n"), ParseError);
  CHECK_THROWS_AS(import_sdpa("*equalities 1\n1\n1\n1\n1\n1 1 1 1 1\n"), ParseError);
}
