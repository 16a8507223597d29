#include "rankbound/analysis.hpp"

#include <Eigen/SVD>

#include "rankbound/errors.hpp"

namespace rankbound {

bool FlatnessReport::flat() const {
  for (const auto& e : entries) {
    if (e.flat) return true;
  }
  return false;
}

int FlatnessReport::rank() const { return entries.empty() ? -1 : entries.front().rank_t; }

namespace {

Eigen::MatrixXd moment_matrix_values(std::span<const double> y, const MomentTable& tab, int s) {
  if (s < 0 || s > tab.t()) {
    throw LevelError("moment matrix order s=" + std::to_string(s) + " outside [0, t]");
  }
  const std::vector<Word> basis = tab.basis(s);
  const auto d = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    const Word ua = involution(basis[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = a; b < d; ++b) {
      const double v = tab.expr(ua * basis[static_cast<std::size_t>(b)]).evaluate(y);
      m(a, b) = v;
      m(b, a) = v;
    }
  }
  return m;
}

}  // namespace

Eigen::MatrixXd extract_moment_matrix(const SdpSolution& sol, const MomentTable& tab, int s) {
  if (sol.status != SolveStatus::optimal) {
    throw NotSolved(std::string("solution status is ") + to_string(sol.status));
  }
  return moment_matrix_values(sol.y, tab, s);
}

int numeric_rank(const Eigen::MatrixXd& m, double threshold) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > threshold) ++r;
  }
  return r;
}

FlatnessReport flatness_from_values(std::span<const double> y, const MomentTable& tab, double rank_tol) {
  FlatnessReport rep;
  rep.t = tab.t();
  const Eigen::MatrixXd mt = moment_matrix_values(y, tab, tab.t());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(mt);
  const double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  const double thr = rank_tol * smax;
  int rank_t = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()[i] > thr) ++rank_t;
  }
  for (int delta = 1; delta <= tab.t(); ++delta) {
    // M_{t-delta} is the leading principal submatrix of M_t (graded basis order).
    const auto k = static_cast<Eigen::Index>(tab.basis(tab.t() - delta).size());
    FlatnessEntry e;
    e.delta = delta;
    e.rank_t = rank_t;
    e.rank_lower = numeric_rank(mt.topLeftCorner(k, k), thr);
    e.threshold = thr;
    e.flat = e.rank_t == e.rank_lower;
    rep.entries.push_back(e);
  }
  return rep;
}

FlatnessReport flatness(const SdpSolution& sol, const MomentTable& tab, double rank_tol) {
  if (sol.status != SolveStatus::optimal) {
    throw NotSolved(std::string("solution status is ") + to_string(sol.status));
  }
  return flatness_from_values(sol.y, tab, rank_tol);
}

}  // namespace rankbound
