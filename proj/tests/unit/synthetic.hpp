#pragma once

#include <random>

#include <Eigen/Dense>

#include "rankbound/sdp.hpp"

namespace rankbound::testing {

struct Synthetic {
  SdpProblem problem;
  std::vector<double> y_opt;
  double optimum = 0.0;
};

// Random SDP with a strictly complementary optimal pair (y*, X*) planted, so the
// optimum is b'y* = -<C, X*> - c'x*.
inline Synthetic synthetic_sdp(std::mt19937& rng, bool with_rows = true) {
  std::uniform_int_distribution<int> nvar(2, 8), nblk(1, 3), dimd(2, 6), nrow(0, 4);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> pos(0.5, 2.0);
  Synthetic s;
  SdpProblem& p = s.problem;
  p.nvars = nvar(rng);
  Eigen::VectorXd ystar(p.nvars);
  for (int v = 0; v < p.nvars; ++v) ystar(v) = g(rng);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p.nvars);

  const int nb = nblk(rng);
  for (int k = 0; k < nb; ++k) {
    const int d = dimd(rng);
    Eigen::MatrixXd R(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) R(i, j) = g(rng);
    }
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(R).householderQ();
    const int r = std::uniform_int_distribution<int>(0, d)(rng);
    Eigen::VectorXd xs = Eigen::VectorXd::Zero(d), ss = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i) (i < r ? xs : ss)(i) = pos(rng);
    const Eigen::MatrixXd X = Q * xs.asDiagonal() * Q.transpose();
    const Eigen::MatrixXd S = Q * ss.asDiagonal() * Q.transpose();
    AffineBlock blk(d, "blk" + std::to_string(k));
    Eigen::MatrixXd C = S;
    for (int v = 0; v < p.nvars; ++v) {
      Eigen::MatrixXd Av(d, d);
      for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) Av(i, j) = Av(j, i) = g(rng);
      }
      C -= ystar(v) * Av;
      b(v) += (Av.cwiseProduct(X)).sum();
      for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) blk.add_coefficient(v, i, j, Av(i, j));
      }
    }
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) blk.add_constant(i, j, C(i, j));
    }
    p.blocks.push_back(std::move(blk));
  }

  if (with_rows) {
    const int nr = nrow(rng);
    for (int r = 0; r < nr; ++r) {
      LinearRow row;
      row.sense = RowSense::geq_zero;
      Eigen::VectorXd a(p.nvars);
      for (int v = 0; v < p.nvars; ++v) a(v) = g(rng);
      const bool active = r % 2 == 0;
      const double slack = active ? 0.0 : pos(rng);
      for (int v = 0; v < p.nvars; ++v) row.coeffs.emplace_back(v, a(v));
      row.constant = slack - a.dot(ystar);
      if (active) b += pos(rng) * a;
      p.ineq_rows.push_back(row);
    }
    const int ne = std::uniform_int_distribution<int>(0, std::min(2, p.nvars - 1))(rng);
    for (int r = 0; r < ne; ++r) {
      LinearRow row;
      Eigen::VectorXd a(p.nvars);
      for (int v = 0; v < p.nvars; ++v) a(v) = g(rng);
      for (int v = 0; v < p.nvars; ++v) row.coeffs.emplace_back(v, a(v));
      row.constant = -a.dot(ystar);
      b += g(rng) * a;
      p.eq_rows.push_back(row);
    }
  }
  for (int v = 0; v < p.nvars; ++v) p.objective.emplace_back(v, b(v));
  s.y_opt.assign(ystar.data(), ystar.data() + ystar.size());
  s.optimum = b.dot(ystar);
  return s;
}

}  // namespace rankbound::testing
