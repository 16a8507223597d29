#include "rankbound/sdp.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "rankbound/errors.hpp"

namespace rankbound {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::infeasible:
      return "infeasible";
    case SolveStatus::unbounded:
      return "unbounded";
    case SolveStatus::max_iter:
      return "max_iter";
    case SolveStatus::numerical_error:
      return "numerical_error";
  }
  return "unknown";
}

void SdpProblem::add_row(LinearRow row) {
  if (row.sense == RowSense::equality) {
    eq_rows.push_back(std::move(row));
  } else {
    ineq_rows.push_back(std::move(row));
  }
}

void SdpProblem::validate() const {
  if (nvars < 1) {
    throw IllFormed("problem has no variables");
  }
  if (objective.empty()) {
    throw IllFormed("empty objective");
  }
  std::vector<char> used(static_cast<std::size_t>(nvars), 0);
  auto mark = [&](int v, const std::string& where) {
    if (v < 0 || v >= nvars) {
      throw IllFormed("variable " + std::to_string(v) + " out of range in " + where);
    }
    used[static_cast<std::size_t>(v)] = 1;
  };
  for (const auto& [v, c] : objective) {
    if (v < 0 || v >= nvars) {
      throw IllFormed("objective references undeclared variable " + std::to_string(v));
    }
  }
  for (const auto& b : blocks) {
    if (b.dim() < 1 || b.constant().rows() != b.dim() || b.constant().cols() != b.dim()) {
      throw IllFormed("block '" + b.label() + "' has inconsistent dimensions");
    }
    for (const auto& [v, list] : b.coeffs()) {
      mark(v, "block " + b.label());
      for (const auto& e : list) {
        if (e.row < 0 || e.col < 0 || e.row >= b.dim() || e.col >= b.dim()) {
          throw IllFormed("entry out of range in block '" + b.label() + "'");
        }
      }
    }
  }
  for (const auto* rows : {&eq_rows, &ineq_rows}) {
    for (const auto& r : *rows) {
      for (const auto& [v, c] : r.coeffs) {
        mark(v, "row " + r.label);
      }
    }
  }
  for (int v = 0; v < nvars; ++v) {
    if (!used[static_cast<std::size_t>(v)]) {
      throw IllFormed("variable " + std::to_string(v) + " is not referenced by any constraint");
    }
  }
}

void measure_residuals(const SdpProblem& problem, SdpSolution& sol) {
  sol.max_psd_violation = 0.0;
  sol.max_eq_residual = 0.0;
  sol.max_ineq_violation = 0.0;
  if (static_cast<int>(sol.y.size()) != problem.nvars) {
    return;
  }
  for (const auto& b : problem.blocks) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.evaluate(sol.y), Eigen::EigenvaluesOnly);
    sol.max_psd_violation = std::max(sol.max_psd_violation, -es.eigenvalues().minCoeff());
  }
  for (const auto& r : problem.eq_rows) {
    sol.max_eq_residual = std::max(sol.max_eq_residual, std::abs(r.evaluate(sol.y)));
  }
  for (const auto& r : problem.ineq_rows) {
    sol.max_ineq_violation = std::max(sol.max_ineq_violation, -r.evaluate(sol.y));
  }
}

}  // namespace rankbound
