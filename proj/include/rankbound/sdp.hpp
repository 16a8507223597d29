#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rankbound/affine.hpp"

namespace rankbound {

// minimize objective . y + objective_constant
//   s.t. every block(y) PSD, eq_rows(y) == 0, ineq_rows(y) >= 0.
struct SdpProblem {
  int nvars = 0;
  std::vector<std::pair<int, double>> objective;
  double objective_constant = 0.0;
  std::vector<AffineBlock> blocks;
  std::vector<LinearRow> eq_rows;
  std::vector<LinearRow> ineq_rows;
  std::map<std::string, std::string> metadata;

  void add_row(LinearRow row);
  // Throws IllFormed on dimension/index problems or an empty objective.
  void validate() const;
};

enum class SolveStatus { optimal, infeasible, unbounded, max_iter, numerical_error };

const char* to_string(SolveStatus s);

struct SolverOptions {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iter = 200;
  // Dual-ray ratio above which the primal problem is declared infeasible.
  double infeasibility_threshold = 1e8;
  // Eliminate equality rows and strip common block kernels before the IPM run.
  bool presolve = true;
  bool verbose = false;
};

struct SdpSolution {
  SolveStatus status = SolveStatus::max_iter;
  std::vector<double> y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double relative_gap = 0.0;
  // Most negative eigenvalue over blocks (0 when all PSD), reported as a positive number.
  double max_psd_violation = 0.0;
  double max_eq_residual = 0.0;
  double max_ineq_violation = 0.0;
  // |C + A(y) - S| / (1 + |C|), per block and row group.
  double primal_infeasibility = 0.0;
  // |b - A*(X) - G'x - E'w| / (1 + |b| + |A*(|X|) + |G'||x| + |E'||w||).
  double dual_infeasibility = 0.0;
  int iterations = 0;
  std::string diagnostics;
};

SdpSolution solve(const SdpProblem& problem, const SolverOptions& options = {});

// Violation measures of y against the problem, filled into a solution record.
void measure_residuals(const SdpProblem& problem, SdpSolution& sol);

}  // namespace rankbound
