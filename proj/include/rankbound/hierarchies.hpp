#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rankbound/analysis.hpp"
#include "rankbound/moment_table.hpp"
#include "rankbound/polynomial.hpp"
#include "rankbound/sdp.hpp"

namespace rankbound {

enum class RankKind { cpsd, cp, nonneg, psd, nuclear };

const char* to_string(RankKind k);
RankKind parse_kind(const std::string& s);

struct Variants {
  // g_v = v'Av - (sum_i v_i x_i)^2 localizers (cpsd, cp).
  std::vector<Eigen::VectorXd> V;
  // cp: positivity rows plus tensor levels 2..t; nonneg: positivity rows.
  bool dagger = false;
  // Extra tensor levels, on top of those implied by dagger (cp only).
  std::vector<int> tensor_levels;
  // Bilinear blocks L(p* g p g2) for pairs of indices into the localizer list.
  std::vector<std::pair<int, int>> bilinear_pairs;
  // psd: all pairs (x_i, sum_i A_ij - x_{m+j}).
  bool bilinear_cross = false;
  // cpsd: ideal generated by kernel vectors of A and by x_i x_j for zero entries.
  bool kernel = false;
  // cp: monomials of degree 1 and 2 added as localizers.
  bool extra_monomial_localizers = false;
  // psd: impose the sum-to-identity ideal with equality rows instead of eliminating x_m.
  bool psd_ideal_rows = false;

  std::string str() const;
};

struct BoundRequest {
  RankKind kind = RankKind::cpsd;
  Eigen::MatrixXd A;
  int t = 1;
  Variants variants;
};

struct BuiltProblem {
  SdpProblem problem;
  std::optional<MomentTable> table;
  std::vector<Polynomial> localizers;
  std::vector<std::string> warnings;
};

BuiltProblem build_cpsd(const BoundRequest& req);
BuiltProblem build_cp(const BoundRequest& req);
BuiltProblem build_nonneg(const BoundRequest& req);
BuiltProblem build_psd(const BoundRequest& req);
BuiltProblem build_nuclear(const BoundRequest& req);
BuiltProblem build(const BoundRequest& req);

// Baseline SDPs tau_cp^sos (kind=cp) and tau_+^sos (kind=nonneg); y_0 is alpha.
SdpProblem tau_sos(const Eigen::MatrixXd& A, RankKind kind);

// (sum_i sqrt(A_ii))^2 / sum_ij A_ij.
double analytic_cpsd(const Eigen::MatrixXd& A);
// sum_i max_j A_ij / (sum_i A_ij).
double analytic_psd(const Eigen::MatrixXd& A);

// Deterministic nested unit-vector sets; one representative per +/- pair.
std::vector<Eigen::VectorXd> sphere_grid(int n, int k);

struct BoundResult {
  RankKind kind = RankKind::cpsd;
  int t = 0;
  std::string variants;
  SolveStatus status = SolveStatus::max_iter;
  std::optional<double> value;
  SdpSolution solution;
  std::optional<FlatnessReport> flat;
  std::map<std::string, double> baselines;
  std::vector<std::string> warnings;
  int nvars = 0;
  std::vector<int> block_dims;
};

struct BoundOptions {
  SolverOptions solver;
  double rank_tol = 1e-6;
  bool baselines = false;
};

BoundResult compute_bound(const BoundRequest& req, const BoundOptions& options = {});

// Closed-form and SDP baselines applicable to the kind (rank, analytic bounds, tau^sos).
std::map<std::string, double> baselines(RankKind kind, const Eigen::MatrixXd& A, const SolverOptions& opts = {});

}  // namespace rankbound
