#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>

#include "doctest.h"
#include "rankbound/errors.hpp"
#include "rankbound/hierarchies.hpp"
#include "rankbound/instances.hpp"

using namespace rankbound;

namespace {

constexpr double kTol = 1e-5;

double bound(RankKind kind, const Eigen::MatrixXd& A, int t, Variants v = {}) {
  BoundRequest req;
  req.kind = kind;
  req.A = A;
  req.t = t;
  req.variants = std::move(v);
  const BoundResult r = compute_bound(req);
  INFO(std::string(to_string(kind)) << " t=" << t << " status " << std::string(to_string(r.status)) << " " << r.solution.diagnostics
                       << "\nA=\n" << std::setprecision(17) << A);
  REQUIRE(r.value.has_value());
  return *r.value;
}

double tau(const Eigen::MatrixXd& A, RankKind kind) {
  const SdpSolution s = solve(tau_sos(A, kind));
  REQUIRE(s.status == SolveStatus::optimal);
  return s.primal_objective;
}

Variants dagger() {
  Variants v;
  v.dagger = true;
  return v;
}

// B B' with B entrywise positive: completely positive with cp-rank <= k. For
// k >= n, resampled until well conditioned; nearly singular A make the
// relaxations ill-posed (the bound then jumps under perturbations of size eps).
Eigen::MatrixXd random_cp(std::mt19937& rng, int n, int k) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (;;) {
    Eigen::MatrixXd B(n, k);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < k; ++j) B(i, j) = u(rng);
    }
    const Eigen::MatrixXd A = B * B.transpose();
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues();
    if (k < n || ev(0) >= 0.02 * ev(n - 1)) return A;
  }
}

Eigen::MatrixXd random_nonneg(std::mt19937& rng, int m, int n) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Eigen::MatrixXd A(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) A(i, j) = u(rng);
  }
  return A;
}

Eigen::MatrixXd permutation(std::mt19937& rng, int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) P(i, p[static_cast<std::size_t>(i)]) = 1.0;
  return P;
}

Eigen::MatrixXd direct_sum(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(A.rows() + B.rows(), A.cols() + B.cols());
  S.topLeftCorner(A.rows(), A.cols()) = A;
  S.bottomRightCorner(B.rows(), B.cols()) = B;
  return S;
}

}  // namespace

TEST_CASE("cpsd examples") {
  const Eigen::MatrixXd A = gen("A_alpha", {0.5}).values;
  CHECK(bound(RankKind::cpsd, A, 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
  CHECK(bound(RankKind::cpsd, A, 2) == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(bound(RankKind::cpsd, Eigen::MatrixXd::Identity(4, 4), 1) == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("cp examples") {
  CHECK(bound(RankKind::cp, Eigen::MatrixXd::Identity(3, 3), 1) == doctest::Approx(3.0).epsilon(1e-6));
  BoundRequest req;
  req.kind = RankKind::cp;
  req.A = (Eigen::MatrixXd(2, 2) << 1, 2, 2, 1).finished();
  req.t = 1;
  const BoundResult r = compute_bound(req);
  CHECK(r.status == SolveStatus::infeasible);
  CHECK(!r.value.has_value());
  CHECK(!r.warnings.empty());
}

TEST_CASE("nonneg examples") {
  CHECK(bound(RankKind::nonneg, Eigen::MatrixXd::Ones(2, 2), 1) == doctest::Approx(1.0).epsilon(1e-6));
  const Eigen::MatrixXd A = gen("nonneg2x2", {0.5}).values;
  CHECK(bound(RankKind::nonneg, A, 2) == doctest::Approx(1.5).epsilon(1e-5));
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(3, 2);
  Z.topRows(2) = A;
  CHECK(bound(RankKind::nonneg, Z, 2) == doctest::Approx(bound(RankKind::nonneg, A, 2)).epsilon(1e-5));
}

TEST_CASE("nuclear examples") {
  CHECK(bound(RankKind::nuclear, Eigen::MatrixXd::Ones(1, 1), 1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(bound(RankKind::nuclear, Eigen::MatrixXd::Identity(2, 2), 2) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("nuclear bound lies between the trace norm and an explicit atomic decomposition") {
  std::mt19937 rng(41);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::MatrixXd A = random_nonneg(rng, 2, 2);
    const double mu = bound(RankKind::nuclear, A, rep % 10 == 0 ? 2 : 1);
    const double trace_norm = Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues().sum();
    // A = sum_ij A_ij e_i e_j' costs sum_ij A_ij.
    CHECK(mu >= trace_norm - kTol);
    CHECK(mu <= A.sum() + kTol);
  }
}

TEST_CASE("tau_sos examples") {
  for (double a : {0.25, 0.5, 0.75}) {
    CHECK(tau(gen("nonneg2x2", {a}).values, RankKind::nonneg) == doctest::Approx(2.0 / (1.0 + a)).epsilon(1e-6));
  }
  CHECK(tau(gen("bipartite", {0, 0}).values, RankKind::cp) == doctest::Approx(6.0).epsilon(1e-6));
}

TEST_CASE("analytic baselines") {
  CHECK(analytic_cpsd(Eigen::MatrixXd::Identity(5, 5)) == doctest::Approx(5.0));
  CHECK(analytic_cpsd(gen("A_alpha", {0.5}).values) == doctest::Approx(4.0 / 3.0));
  CHECK(std::abs(analytic_cpsd(gen("cos2_circulant5").values) - 2.0) < 1e-12);
  CHECK_THROWS_AS(analytic_cpsd(Eigen::MatrixXd::Zero(2, 2)), ZeroMatrix);
  CHECK(analytic_psd(Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(3.0));
  CHECK(analytic_psd(Eigen::MatrixXd::Ones(2, 4)) == doctest::Approx(1.0));
  const Eigen::MatrixXd H = gen("slack_hexagon").values;
  double direct = 0.0;
  for (int i = 0; i < H.rows(); ++i) {
    double best = 0.0;
    for (int j = 0; j < H.cols(); ++j) best = std::max(best, H(i, j) / H.col(j).sum());
    direct += best;
  }
  CHECK(analytic_psd(H) == doctest::Approx(direct));
  CHECK(direct > 1.0);
  CHECK(direct <= 3.0);
  CHECK_THROWS_AS(analytic_psd((Eigen::MatrixXd(2, 2) << 1, 0, 1, 0).finished()), ZeroColumn);
}

TEST_CASE("sphere_grid") {
  const auto g1 = sphere_grid(2, 1);
  CHECK(g1.size() == 4);
  for (int n = 1; n <= 4; ++n) {
    for (int k = 1; k <= 3; ++k) {
      const auto a = sphere_grid(n, k), b = sphere_grid(n, k + 1);
      REQUIRE(a.size() <= b.size());
      for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i] - b[i]).norm() == 0.0);
      for (const auto& v : b) CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("bounds are nondecreasing in t and in the variants") {
  std::mt19937 rng(12);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + rep % 2;
    const Eigen::MatrixXd A = random_cp(rng, n, n + 1);
    const RankKind kind = rep % 2 ? RankKind::cp : RankKind::cpsd;
    const double b1 = bound(kind, A, 1), b2 = bound(kind, A, 2);
    CHECK(b1 <= b2 + kTol);
    Variants v;
    if (kind == RankKind::cp) {
      v.dagger = true;
    } else {
      v.V = sphere_grid(n, 1);
    }
    CHECK(b2 <= bound(kind, A, 2, v) + kTol);
  }
}

TEST_CASE("permutation and diagonal scaling invariance") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> s(0.5, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + rep % 3;
    const int t = n <= 3 ? 1 + rep % 2 : 1;
    const RankKind kind = rep % 2 ? RankKind::cp : RankKind::cpsd;
    const Eigen::MatrixXd A = random_cp(rng, n, n);
    const Eigen::MatrixXd P = permutation(rng, n);
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = s(rng);
    const double base = bound(kind, A, t);
    CHECK(std::abs(bound(kind, P.transpose() * A * P, t) - base) <= kTol * std::max(1.0, base));
    CHECK(std::abs(bound(kind, d.asDiagonal() * A * d.asDiagonal(), t) - base) <= kTol * std::max(1.0, base));
  }
}

TEST_CASE("principal submatrices give smaller bounds") {
  std::mt19937 rng(14);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 3 + rep % 2;
    const int t = n == 3 ? 1 + rep % 2 : 1;
    const RankKind kind = rep % 4 < 2 ? RankKind::cp : RankKind::cpsd;
    const Eigen::MatrixXd A = random_cp(rng, n, n);
    std::vector<int> keep;
    for (int i = 0; i < n; ++i) {
      if (rng() % 3 != 0) keep.push_back(i);
    }
    if (keep.empty()) keep.push_back(0);
    Eigen::MatrixXd B(keep.size(), keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
      for (std::size_t j = 0; j < keep.size(); ++j) {
        B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = A(keep[i], keep[j]);
      }
    }
    CHECK(bound(kind, B, t) <= bound(kind, A, t) + kTol);
  }
}

TEST_CASE("direct sums are subadditive") {
  std::mt19937 rng(15);
  for (int rep = 0; rep < 100; ++rep) {
    const int t = 1 + rep % 2;
    const RankKind kind = rep % 2 ? RankKind::cp : RankKind::cpsd;
    const Eigen::MatrixXd A = random_cp(rng, 1 + static_cast<int>(rng() % 2), 2);
    const Eigen::MatrixXd B = random_cp(rng, 1 + static_cast<int>(rng() % 2), 2);
    CHECK(bound(kind, direct_sum(A, B), t) <= bound(kind, A, t) + bound(kind, B, t) + kTol);
  }
}

TEST_CASE("baseline dominance") {
  std::mt19937 rng(16);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + rep % 2;
    const Eigen::MatrixXd A = random_cp(rng, n, n + 1);
    CHECK(bound(RankKind::cpsd, A, 1) >= analytic_cpsd(A) - kTol);
    CHECK(bound(RankKind::cp, A, 2, dagger()) >= tau(A, RankKind::cp) - kTol);
  }
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::MatrixXd A = random_nonneg(rng, 2 + rep % 2, 2);
    CHECK(bound(RankKind::nonneg, A, 2, dagger()) >= tau(A, RankKind::nonneg) - kTol);
  }
}

TEST_CASE("bounds never exceed an explicit factorization size") {
  std::mt19937 rng(17);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + rep % 2;
    const int k = n + rep % 3;
    const Eigen::MatrixXd A = random_cp(rng, n, k);
    CHECK(bound(RankKind::cp, A, 2, dagger()) <= k + 1e-4);
    CHECK(bound(RankKind::cpsd, A, 2) <= k + 1e-4);
  }
}

TEST_CASE("psd examples on small slack matrices") {
  // Both factorizations have size 2: rank one and identity-like matrices.
  CHECK(bound(RankKind::psd, Eigen::MatrixXd::Ones(2, 3), 1) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(bound(RankKind::psd, Eigen::MatrixXd::Identity(3, 3), 2) == doctest::Approx(3.0).epsilon(1e-5));
}

TEST_CASE("substitution and ideal rows agree for psd") {
  const Eigen::MatrixXd A = gen("circulant3", {1.0, 2.0}).values;
  Variants rows;
  rows.psd_ideal_rows = true;
  const double a = bound(RankKind::psd, A, 1);
  const double b = bound(RankKind::psd, A, 1, rows);
  CHECK(std::abs(a - b) < 1e-5);
}

TEST_CASE("invalid requests") {
  BoundRequest req;
  req.kind = RankKind::cpsd;
  req.A = Eigen::MatrixXd::Ones(2, 3);
  CHECK_THROWS_AS(build(req), ParamRange);
  req.A = Eigen::MatrixXd::Identity(2, 2);
  req.t = 0;
  CHECK_THROWS_AS(build(req), LevelError);
  CHECK_THROWS_AS(parse_kind("bogus"), ParamRange);
  CHECK(parse_kind("nonneg") == RankKind::nonneg);
}
