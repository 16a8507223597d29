#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rankbound/moment_table.hpp"
#include "rankbound/sdp.hpp"

namespace rankbound {

struct FlatnessEntry {
  int delta = 0;
  int rank_t = 0;
  int rank_lower = 0;  // rank of M_{t - delta}
  double threshold = 0.0;
  bool flat = false;
};

struct FlatnessReport {
  int t = 0;
  std::vector<FlatnessEntry> entries;  // delta = 1..t

  bool flat() const;
  // Rank of M_t, or -1 for an empty report.
  int rank() const;
};

// Numeric M_s(L) over tab.basis(s). Throws NotSolved unless the solution is optimal.
Eigen::MatrixXd extract_moment_matrix(const SdpSolution& sol, const MomentTable& tab, int s);

// Number of singular values above threshold.
int numeric_rank(const Eigen::MatrixXd& m, double threshold);

// Ranks of M_t and M_{t-delta} with threshold rank_tol * sigma_max(M_t).
FlatnessReport flatness(const SdpSolution& sol, const MomentTable& tab, double rank_tol = 1e-6);
FlatnessReport flatness_from_values(std::span<const double> y, const MomentTable& tab, double rank_tol);

}  // namespace rankbound
