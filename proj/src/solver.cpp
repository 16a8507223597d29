// Infeasible primal-dual interior-point method (HKM direction, Mehrotra
// predictor-corrector) for
//   min b'y  s.t.  S_k = C_k + sum_v y_v A_kv >= 0,  G y + g0 >= 0,  E y = f.
// Dual: max -<C,X> - g0'x + f'w  s.t.  A*(X) + G'x + E'w = b,  X >= 0, x >= 0.
// All loops run in a fixed order, so results are bitwise reproducible.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "rankbound/errors.hpp"
#include "rankbound/sdp.hpp"

namespace rankbound {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Entry {
  int a;
  int b;
  double v;
};

struct Block {
  int dim = 0;
  MatrixXd C;
  std::vector<int> var;                    // global ids, increasing
  std::vector<std::vector<Entry>> entries;  // both orientations
  std::vector<std::vector<int>> rows;       // distinct row indices per local var
  MatrixXd X, S, Sinv, Rp;
};

struct Row {
  std::vector<std::pair<int, double>> a;
  double c = 0.0;
};

double frob(const MatrixXd& m) { return m.norm(); }

MatrixXd apply(const Block& blk, const VectorXd& y) {
  MatrixXd m = MatrixXd::Zero(blk.dim, blk.dim);
  for (std::size_t i = 0; i < blk.var.size(); ++i) {
    const double yv = y[blk.var[i]];
    if (yv == 0.0) continue;
    for (const Entry& e : blk.entries[i]) {
      m(e.a, e.b) += yv * e.v;
    }
  }
  return m;
}

double row_dot(const Row& r, const VectorXd& y) {
  double s = 0.0;
  for (const auto& [v, c] : r.a) s += c * y[v];
  return s;
}

// Largest alpha with M + alpha*dM PSD (infinity if unbounded).
double max_step(const MatrixXd& M, const MatrixXd& dM) {
  Eigen::LLT<MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) {
    return 0.0;
  }
  MatrixXd T = llt.matrixL().solve(dM);
  T = llt.matrixL().solve(T.transpose()).transpose();
  T = 0.5 * (T + T.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(T, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

double max_step_lp(const VectorXd& s, const VectorXd& ds) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (ds[i] < 0.0) a = std::min(a, -s[i] / ds[i]);
  }
  return a;
}

class Ipm {
 public:
  Ipm(const SdpProblem& p, const SolverOptions& o) : opt_(o), nv_(p.nvars) { setup(p); }

  SdpSolution run();

 private:
  void setup(const SdpProblem& p);
  bool presolve_equalities(const std::vector<LinearRow>& rows);
  void build_schur();
  bool factor();
  void solve_kkt(const VectorXd& rhs_y, const VectorXd& rhs_e, VectorXd& dy, VectorXd& dw) const;
  struct Direction {
    std::vector<MatrixXd> dX, dS;
    VectorXd dx, ds, dy, dw;
  };
  // Complementarity target sigma*mu*I - X S - corr; corr may be empty (predictor).
  // X S S^{-1} is never formed: it cancels badly once S is ill-conditioned.
  Direction direction(double smu, const std::vector<MatrixXd>& corr, const VectorXd& corr_lp);
  void step_lengths(const Direction& d, double& ap, double& ad) const;

  SolverOptions opt_;
  int nv_;
  VectorXd b_;
  double c0_ = 0.0;
  std::vector<Block> blocks_;
  std::vector<Row> lp_;
  std::vector<Row> eq_;
  VectorXd f_;
  bool trivially_infeasible_ = false;
  std::string pre_diag_;

  // Iterate.
  VectorXd y_, x_, s_, w_;
  VectorXd rp_lp_, re_, rd_;

  // KKT.
  MatrixXd H_;
  Eigen::LDLT<MatrixXd> kkt_;
  MatrixXd K_;
  VectorXd D_;
  bool use_llt_ = false;
  Eigen::LLT<MatrixXd> llt_;
  Eigen::LLT<MatrixXd> mllt_;
  MatrixXd Wt_;      // H^{-1} E' (scaled)
  MatrixXd Kreg_e_;  // E (scaled)
  VectorXd solve_scaled(const VectorXd& v) const;
};

void Ipm::setup(const SdpProblem& p) {
  b_ = VectorXd::Zero(nv_);
  for (const auto& [v, c] : p.objective) b_[v] += c;
  c0_ = p.objective_constant;

  for (const auto& ab : p.blocks) {
    if (ab.coeffs().empty()) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(ab.constant(), Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -opt_.feas_tol) {
        trivially_infeasible_ = true;
        pre_diag_ += "constant block '" + ab.label() + "' is not PSD; ";
      }
      continue;
    }
    Block blk;
    blk.dim = ab.dim();
    blk.C = ab.constant();
    for (const auto& [v, list] : ab.coeffs()) {
      std::vector<Entry> ent;
      for (const auto& e : list) {
        if (e.value == 0.0) continue;
        ent.push_back({e.row, e.col, e.value});
        if (e.row != e.col) ent.push_back({e.col, e.row, e.value});
      }
      if (ent.empty()) continue;
      std::vector<int> rows;
      for (const Entry& e : ent) rows.push_back(e.a);
      std::sort(rows.begin(), rows.end());
      rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
      blk.var.push_back(v);
      blk.entries.push_back(std::move(ent));
      blk.rows.push_back(std::move(rows));
    }
    blocks_.push_back(std::move(blk));
  }

  for (const auto& r : p.ineq_rows) {
    double nrm = 0.0;
    for (const auto& [v, c] : r.coeffs) nrm += c * c;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) {
      if (r.constant < -opt_.feas_tol) {
        trivially_infeasible_ = true;
        pre_diag_ += "inequality '" + r.label + "' has no variables and is violated; ";
      }
      continue;
    }
    Row row;
    for (const auto& [v, c] : r.coeffs) row.a.emplace_back(v, c / nrm);
    row.c = r.constant / nrm;
    lp_.push_back(std::move(row));
  }
  if (!presolve_equalities(p.eq_rows)) {
    trivially_infeasible_ = true;
  }
}

bool Ipm::presolve_equalities(const std::vector<LinearRow>& rows) {
  std::vector<Row> kept;
  for (const auto& r : rows) {
    double nrm = 0.0;
    for (const auto& [v, c] : r.coeffs) nrm += c * c;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) {
      if (std::abs(r.constant) > opt_.feas_tol) {
        pre_diag_ += "equality '" + r.label + "' has no variables and is violated; ";
        return false;
      }
      continue;
    }
    Row row;
    for (const auto& [v, c] : r.coeffs) row.a.emplace_back(v, c / nrm);
    row.c = r.constant / nrm;
    kept.push_back(std::move(row));
  }
  if (kept.empty()) {
    f_ = VectorXd::Zero(0);
    return true;
  }
  const int m = static_cast<int>(kept.size());
  MatrixXd Et = MatrixXd::Zero(nv_, m);
  VectorXd f(m);
  for (int i = 0; i < m; ++i) {
    for (const auto& [v, c] : kept[static_cast<std::size_t>(i)].a) Et(v, i) += c;
    f[i] = -kept[static_cast<std::size_t>(i)].c;
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(Et);
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());
  // Consistency: f must lie in the row space of E.
  VectorXd y = Et.transpose().colPivHouseholderQr().solve(f);
  const double res = (Et.transpose() * y - f).norm();
  if (res > 1e-8 * (1.0 + f.norm())) {
    pre_diag_ += "equality rows are inconsistent (residual " + std::to_string(res) + "); ";
    return false;
  }
  std::vector<int> keep;
  for (int i = 0; i < rank; ++i) keep.push_back(static_cast<int>(qr.colsPermutation().indices()[i]));
  std::sort(keep.begin(), keep.end());
  f_.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    eq_.push_back(kept[static_cast<std::size_t>(keep[i])]);
    f_[static_cast<Eigen::Index>(i)] = f[keep[i]];
  }
  return true;
}

void Ipm::build_schur() {
  H_ = MatrixXd::Zero(nv_, nv_);
  for (const Block& blk : blocks_) {
    const int nb = static_cast<int>(blk.var.size());
    const int d = blk.dim;
    // Suffix sums of entry counts decide between pairwise and dense evaluation.
    std::vector<double> suffix(static_cast<std::size_t>(nb) + 1, 0.0);
    for (int i = nb - 1; i >= 0; --i) {
      suffix[static_cast<std::size_t>(i)] =
          suffix[static_cast<std::size_t>(i) + 1] + static_cast<double>(blk.entries[static_cast<std::size_t>(i)].size());
    }
    MatrixXd G;
    for (int i = 0; i < nb; ++i) {
      const auto& Ei = blk.entries[static_cast<std::size_t>(i)];
      const int vi = blk.var[static_cast<std::size_t>(i)];
      const double pair_cost = static_cast<double>(Ei.size()) * suffix[static_cast<std::size_t>(i)];
      const double dense_cost =
          static_cast<double>(d) * d * static_cast<double>(blk.rows[static_cast<std::size_t>(i)].size()) +
          suffix[static_cast<std::size_t>(i)];
      if (pair_cost > dense_cost) {
        // G = X A_i S^{-1}; H_ij = sum_{(c,d) in E_j} A_j(c,d) G(d,c).
        const auto& rows = blk.rows[static_cast<std::size_t>(i)];
        MatrixXd M = MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), d);
        for (const Entry& e : Ei) {
          const auto pos = std::lower_bound(rows.begin(), rows.end(), e.a) - rows.begin();
          M.row(pos) += e.v * blk.Sinv.row(e.b);
        }
        MatrixXd Xc(d, static_cast<Eigen::Index>(rows.size()));
        for (std::size_t k = 0; k < rows.size(); ++k) Xc.col(static_cast<Eigen::Index>(k)) = blk.X.col(rows[k]);
        G.noalias() = Xc * M;
        for (int j = i; j < nb; ++j) {
          double s = 0.0;
          for (const Entry& e : blk.entries[static_cast<std::size_t>(j)]) s += e.v * G(e.b, e.a);
          const int vj = blk.var[static_cast<std::size_t>(j)];
          H_(std::min(vi, vj), std::max(vi, vj)) += s;
        }
      } else {
        for (int j = i; j < nb; ++j) {
          double s = 0.0;
          for (const Entry& ea : Ei) {
            for (const Entry& ec : blk.entries[static_cast<std::size_t>(j)]) {
              s += ea.v * ec.v * blk.X(ea.b, ec.a) * blk.Sinv(ec.b, ea.a);
            }
          }
          const int vj = blk.var[static_cast<std::size_t>(j)];
          H_(std::min(vi, vj), std::max(vi, vj)) += s;
        }
      }
    }
  }
  for (std::size_t r = 0; r < lp_.size(); ++r) {
    const double dr = x_[static_cast<Eigen::Index>(r)] / s_[static_cast<Eigen::Index>(r)];
    for (const auto& [v, c] : lp_[r].a) {
      for (const auto& [w, c2] : lp_[r].a) {
        if (v <= w) H_(v, w) += dr * c * c2;
      }
    }
  }
  H_.triangularView<Eigen::StrictlyLower>() = H_.transpose().triangularView<Eigen::StrictlyLower>();
}

bool Ipm::factor() {
  const int me = static_cast<int>(eq_.size());
  const int n = nv_ + me;
  K_ = MatrixXd::Zero(n, n);
  K_.topLeftCorner(nv_, nv_) = H_;
  for (int i = 0; i < me; ++i) {
    for (const auto& [v, c] : eq_[static_cast<std::size_t>(i)].a) {
      K_(nv_ + i, v) += c;
      K_(v, nv_ + i) += c;
    }
  }
  // Symmetric diagonal equilibration: D K D has unit-sized diagonal in the H part
  // and unit-norm rows in the E part.
  D_ = VectorXd::Ones(n);
  for (int i = 0; i < nv_; ++i) {
    const double h = K_(i, i);
    D_[i] = h > 0.0 ? 1.0 / std::sqrt(h) : 1.0;
  }
  for (int i = nv_; i < n; ++i) {
    const double r = (K_.row(i).head(nv_).transpose().cwiseProduct(D_.head(nv_))).norm();
    D_[i] = r > 0.0 ? 1.0 / r : 1.0;
  }
  MatrixXd Kreg = D_.asDiagonal() * K_ * D_.asDiagonal();
  for (int i = 0; i < nv_; ++i) Kreg(i, i) += 1e-14;
  for (int i = nv_; i < n; ++i) Kreg(i, i) -= 1e-14;

  // Preferred route: blocked Cholesky of the H part, equalities through the
  // small matrix E H^{-1} E'. Pivoted LDLT of the whole system is the fallback.
  use_llt_ = false;
  llt_.compute(Kreg.topLeftCorner(nv_, nv_));
  if (llt_.info() == Eigen::Success) {
    use_llt_ = true;
    if (me > 0) {
      Kreg_e_ = Kreg.bottomLeftCorner(me, nv_);
      Wt_ = llt_.solve(Kreg.topRightCorner(nv_, me));
      MatrixXd M = Kreg.bottomRightCorner(me, me) - Kreg.bottomLeftCorner(me, nv_) * Wt_;
      // M is negative definite for full-rank E.
      mllt_.compute(-M);
      use_llt_ = mllt_.info() == Eigen::Success;
    }
    if (use_llt_) return true;
  }
  kkt_.compute(Kreg);
  return kkt_.info() == Eigen::Success;
}

Eigen::VectorXd Ipm::solve_scaled(const VectorXd& v) const {
  if (!use_llt_) return kkt_.solve(v);
  const int me = static_cast<int>(eq_.size());
  VectorXd z = llt_.solve(v.head(nv_));
  VectorXd out(nv_ + me);
  if (me == 0) {
    out = z;
    return out;
  }
  // [H E'; E C][a; b] = [r1; r2]:  (C - E H^{-1} E') b = r2 - E z.
  const MatrixXd& Et = Wt_;
  VectorXd r2 = v.tail(me) - Kreg_e_ * z;
  VectorXd bsol = -mllt_.solve(r2);
  out.head(nv_) = z - Et * bsol;
  out.tail(me) = bsol;
  return out;
}

void Ipm::solve_kkt(const VectorXd& rhs_y, const VectorXd& rhs_e, VectorXd& dy, VectorXd& dw) const {
  const int me = static_cast<int>(eq_.size());
  VectorXd rhs(nv_ + me);
  rhs << rhs_y, rhs_e;
  auto inner = [&](const VectorXd& v) -> VectorXd { return D_.cwiseProduct(solve_scaled(D_.cwiseProduct(v))); };
  VectorXd sol = inner(rhs);
  // Refine against the unregularized system while the residual keeps shrinking.
  VectorXd r = rhs - K_ * sol;
  double rn = r.norm();
  for (int it = 0; it < 30 && rn > 1e-15 * rhs.norm(); ++it) {
    VectorXd cand = sol + inner(r);
    VectorXd rc = rhs - K_ * cand;
    const double cn = rc.norm();
    if (!(cn < 0.9 * rn)) break;
    sol = std::move(cand);
    r = std::move(rc);
    rn = cn;
  }
  dy = sol.head(nv_);
  dw = -sol.tail(me);
}

Ipm::Direction Ipm::direction(double smu, const std::vector<MatrixXd>& corr, const VectorXd& corr_lp) {
  Direction d;
  VectorXd h = VectorXd::Zero(nv_);
  std::vector<MatrixXd> T(blocks_.size());
  // base_k = sigma*mu*S^{-1} - X - corr S^{-1}
  std::vector<MatrixXd> base(blocks_.size());
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const Block& blk = blocks_[k];
    base[k] = smu * blk.Sinv - blk.X;
    if (!corr.empty()) base[k] -= corr[k] * blk.Sinv;
  }
  const auto nl = static_cast<Eigen::Index>(lp_.size());
  VectorXd base_lp(nl);
  for (Eigen::Index r = 0; r < nl; ++r) {
    base_lp[r] = smu / s_[r] - x_[r] - (corr_lp.size() ? corr_lp[r] / s_[r] : 0.0);
  }
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const Block& blk = blocks_[k];
    T[k] = base[k] - blk.X * blk.Rp * blk.Sinv;
    for (std::size_t i = 0; i < blk.var.size(); ++i) {
      double s = 0.0;
      for (const Entry& e : blk.entries[i]) s += e.v * T[k](e.b, e.a);
      h[blk.var[i]] += s;
    }
  }
  for (std::size_t r = 0; r < lp_.size(); ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    const double coef = base_lp[ri] - x_[ri] * rp_lp_[ri] / s_[ri];
    for (const auto& [v, c] : lp_[r].a) h[v] += c * coef;
  }
  solve_kkt(h - rd_, re_, d.dy, d.dw);

  d.dX.resize(blocks_.size());
  d.dS.resize(blocks_.size());
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const Block& blk = blocks_[k];
    d.dS[k] = apply(blk, d.dy) + blk.Rp;
    MatrixXd dX = base[k] - blk.X * d.dS[k] * blk.Sinv;
    d.dX[k] = 0.5 * (dX + dX.transpose());
  }
  d.ds.resize(nl);
  d.dx.resize(nl);
  for (Eigen::Index r = 0; r < nl; ++r) {
    d.ds[r] = row_dot(lp_[static_cast<std::size_t>(r)], d.dy) + rp_lp_[r];
    d.dx[r] = base_lp[r] - x_[r] * d.ds[r] / s_[r];
  }
  return d;
}

void Ipm::step_lengths(const Direction& d, double& ap, double& ad) const {
  ap = max_step_lp(s_, d.ds);
  ad = max_step_lp(x_, d.dx);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    ap = std::min(ap, max_step(blocks_[k].S, d.dS[k]));
    ad = std::min(ad, max_step(blocks_[k].X, d.dX[k]));
  }
}

SdpSolution Ipm::run() {
  SdpSolution sol;
  if (trivially_infeasible_) {
    sol.status = SolveStatus::infeasible;
    sol.y.assign(static_cast<std::size_t>(nv_), 0.0);
    sol.diagnostics = "presolve: " + pre_diag_;
    return sol;
  }

  // Starting point scaled to the data.
  double data_scale = 1.0;
  for (const Block& blk : blocks_) {
    data_scale = std::max(data_scale, blk.C.cwiseAbs().maxCoeff());
  }
  double bmax = b_.size() ? b_.cwiseAbs().maxCoeff() : 0.0;
  const double lambda_s = 10.0 * data_scale;
  const double lambda_x = 10.0 * std::max(1.0, bmax);

  y_ = VectorXd::Zero(nv_);
  w_ = VectorXd::Zero(static_cast<Eigen::Index>(eq_.size()));
  const auto nl = static_cast<Eigen::Index>(lp_.size());
  x_ = VectorXd::Constant(nl, lambda_x);
  s_ = VectorXd::Constant(nl, lambda_s);
  double barrier_n = static_cast<double>(nl);
  for (Block& blk : blocks_) {
    blk.X = lambda_x * MatrixXd::Identity(blk.dim, blk.dim);
    blk.S = lambda_s * MatrixXd::Identity(blk.dim, blk.dim);
    barrier_n += blk.dim;
  }

  double cnorm = 0.0;
  for (const Block& blk : blocks_) cnorm = std::max(cnorm, frob(blk.C));
  double g0norm = 0.0;
  for (const Row& r : lp_) g0norm = std::max(g0norm, std::abs(r.c));
  const double bnorm = b_.norm();
  const double fnorm = f_.size() ? f_.norm() : 0.0;

  int stall = 0;
  // Best iterate by max(pinf, dinf, gap), returned when the run ends without convergence.
  double best_merit = std::numeric_limits<double>::infinity();
  SdpSolution best;
  VectorXd best_y;
  int last_progress = 0;
  double progress_mu = std::numeric_limits<double>::infinity();
  double last_short = 0.0;
  for (int it = 0; it <= opt_.max_iter; ++it) {
    sol.iterations = it;
    // Residuals and objectives.
    double pinf = 0.0;
    double cx = 0.0;
    double xs = 0.0;
    VectorXd aty = VectorXd::Zero(nv_);
    // Magnitudes of the summands of A*(X) + G'x + E'w, the scale of the dual residual.
    VectorXd aty_abs = VectorXd::Zero(nv_);
    for (Block& blk : blocks_) {
      blk.Rp = blk.C + apply(blk, y_) - blk.S;
      pinf = std::max(pinf, frob(blk.Rp) / (1.0 + cnorm));
      cx += (blk.C.cwiseProduct(blk.X)).sum();
      xs += (blk.X.cwiseProduct(blk.S)).sum();
      for (std::size_t i = 0; i < blk.var.size(); ++i) {
        double s = 0.0;
        double sa = 0.0;
        for (const Entry& e : blk.entries[i]) {
          s += e.v * blk.X(e.a, e.b);
          sa += std::abs(e.v * blk.X(e.a, e.b));
        }
        aty[blk.var[i]] += s;
        aty_abs[blk.var[i]] += sa;
      }
    }
    rp_lp_.resize(nl);
    double gx = 0.0;
    for (Eigen::Index r = 0; r < nl; ++r) {
      const Row& row = lp_[static_cast<std::size_t>(r)];
      rp_lp_[r] = row_dot(row, y_) + row.c - s_[r];
      gx += row.c * x_[r];
      xs += x_[r] * s_[r];
      for (const auto& [v, c] : row.a) {
        aty[v] += c * x_[r];
        aty_abs[v] += std::abs(c * x_[r]);
      }
    }
    if (nl > 0) pinf = std::max(pinf, rp_lp_.norm() / (1.0 + g0norm));
    re_.resize(static_cast<Eigen::Index>(eq_.size()));
    for (std::size_t i = 0; i < eq_.size(); ++i) {
      re_[static_cast<Eigen::Index>(i)] = f_[static_cast<Eigen::Index>(i)] - row_dot(eq_[i], y_);
      for (const auto& [v, c] : eq_[i].a) {
        aty[v] += c * w_[static_cast<Eigen::Index>(i)];
        aty_abs[v] += std::abs(c * w_[static_cast<Eigen::Index>(i)]);
      }
    }
    if (re_.size() > 0) pinf = std::max(pinf, re_.norm() / (1.0 + fnorm));
    rd_ = b_ - aty;
    const double dinf = rd_.norm() / (1.0 + bnorm + aty_abs.norm());
    const double fw = f_.size() ? f_.dot(w_) : 0.0;
    const double pobj = b_.dot(y_) + c0_;
    const double dobj_raw = -cx - gx + fw;
    const double dobj = dobj_raw + c0_;
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double mu = xs / barrier_n;

    sol.primal_objective = pobj;
    sol.dual_objective = dobj;
    sol.relative_gap = gap;
    sol.primal_infeasibility = pinf;
    sol.dual_infeasibility = dinf;

    if (opt_.verbose) {
      std::fprintf(stderr, "%3d pobj=% .10e dobj=% .10e pinf=%.2e dinf=%.2e gap=%.2e mu=%.2e\n", it, pobj, dobj,
                   pinf, dinf, gap, mu);
    }
    const double merit = std::max({pinf, dinf, gap});
    // Halving mu also counts: the relative gap stays near 1 while objectives are large.
    if (merit < 0.5 * best_merit || mu < 0.5 * progress_mu) {
      last_progress = it;
      progress_mu = std::min(progress_mu, mu);
    }
    if (merit < best_merit) {
      best_merit = merit;
      best = sol;
      best_y = y_;
    }
    if (pinf <= opt_.feas_tol && dinf <= opt_.feas_tol && gap <= opt_.gap_tol) {
      sol.status = SolveStatus::optimal;
      break;
    }
    // Dual ray: (X, x, w) nearly satisfies A*(X)+G'x+E'w = 0 with positive dual value.
    if (dobj_raw > 0.0 && pinf > opt_.feas_tol) {
      const double ray = aty.norm() / dobj_raw;
      if (ray * opt_.infeasibility_threshold < 1.0 + bnorm) {
        sol.status = SolveStatus::infeasible;
        char buf[160];
        std::snprintf(buf, sizeof buf, "dual ray: |A*(X)|/dual value = %.3e, primal infeasibility %.3e", ray, pinf);
        sol.diagnostics = buf;
        break;
      }
    }
    // Primal ray: objective decreasing without bound while staying feasible.
    if (pinf <= std::sqrt(opt_.feas_tol) && -pobj > opt_.infeasibility_threshold * (1.0 + cnorm + bnorm)) {
      sol.status = SolveStatus::unbounded;
      sol.diagnostics = "primal objective diverges to -infinity";
      break;
    }
    if (it - last_progress >= 20) {
      sol.status = SolveStatus::numerical_error;
      sol.diagnostics = "no progress in 20 iterations";
      break;
    }
    if (it == opt_.max_iter) {
      sol.status = SolveStatus::max_iter;
      break;
    }

    // Factorizations for this iteration.
    bool ok = true;
    for (Block& blk : blocks_) {
      Eigen::LLT<MatrixXd> llt(blk.S);
      if (llt.info() != Eigen::Success) {
        ok = false;
        break;
      }
      blk.Sinv = llt.solve(MatrixXd::Identity(blk.dim, blk.dim));
      blk.Sinv = 0.5 * (blk.Sinv + blk.Sinv.transpose());
    }
    if (ok) {
      build_schur();
      ok = factor();
    }
    if (!ok) {
      sol.status = SolveStatus::numerical_error;
      sol.diagnostics = "factorization failed";
      break;
    }

    // Predictor.
    Direction aff = direction(0.0, {}, VectorXd());
    double ap = 0.0;
    double ad = 0.0;
    step_lengths(aff, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double mu_aff = 0.0;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      mu_aff += ((blocks_[k].X + ad * aff.dX[k]).cwiseProduct(blocks_[k].S + ap * aff.dS[k])).sum();
    }
    mu_aff += (x_ + ad * aff.dx).dot(s_ + ap * aff.ds);
    mu_aff /= barrier_n;
    double sigma = std::pow(std::max(0.0, mu_aff) / mu, 3.0);
    // After a short step the iterate has lost centrality; recenter before pushing on.
    sigma = std::clamp(std::max(sigma, last_short * last_short), 0.0, 1.0);

    // Corrector.
    std::vector<MatrixXd> corr(blocks_.size());
    for (std::size_t k = 0; k < blocks_.size(); ++k) corr[k] = aff.dX[k] * aff.dS[k];
    // Complementarity far below what the gap tolerance needs only worsens the
    // conditioning of H; keep the target above a tenth of that level.
    const double mu_floor = 0.1 * opt_.gap_tol * (1.0 + std::abs(pobj) + std::abs(dobj)) / barrier_n;
    Direction d = direction(std::max(sigma * mu, std::min(mu, mu_floor)), corr, aff.dx.cwiseProduct(aff.ds));
    step_lengths(d, ap, ad);
    const double gamma = 0.95;
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);
    if (opt_.verbose) std::fprintf(stderr, "    sigma=%.2e ap=%.3f ad=%.3f\n", sigma, ap, ad);
    last_short = 1.0 - std::min(ap, ad);

    y_ += ap * d.dy;
    s_ += ap * d.ds;
    x_ += ad * d.dx;
    w_ += ad * d.dw;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      blocks_[k].S += ap * d.dS[k];
      blocks_[k].S = 0.5 * (blocks_[k].S + blocks_[k].S.transpose());
      blocks_[k].X += ad * d.dX[k];
    }

    if (ap < 1e-8 && ad < 1e-8) {
      if (++stall >= 3) {
        sol.status = SolveStatus::numerical_error;
        sol.diagnostics = "step lengths collapsed";
        break;
      }
    } else {
      stall = 0;
    }
  }

  if (sol.status != SolveStatus::optimal && sol.status != SolveStatus::infeasible &&
      sol.status != SolveStatus::unbounded && best_y.size() == y_.size()) {
    const SolveStatus status = sol.status;
    const std::string diag = sol.diagnostics;
    const int iters = sol.iterations;
    sol = best;
    sol.status = status;
    sol.iterations = iters;
    char buf[96];
    std::snprintf(buf, sizeof buf, "; returning best iterate (max residual/gap %.2e)", best_merit);
    sol.diagnostics = diag + buf;
    y_ = best_y;
  }
  sol.y.assign(y_.data(), y_.data() + y_.size());
  return sol;
}

// Equality rows are removed by sparse Gauss-Jordan substitution before the
// interior-point run: with equalities in the KKT system the Schur complement
// through an ill-conditioned H loses accuracy near the optimum.
struct Elimination {
  SdpProblem reduced;
  std::vector<AffineExpr> expr;  // original var -> affine in reduced vars
};

bool eliminate_equalities(const SdpProblem& p, Elimination& out) {
  std::vector<AffineExpr> sub(static_cast<std::size_t>(p.nvars));
  std::vector<char> eliminated(static_cast<std::size_t>(p.nvars), 0);
  for (const auto& r : p.eq_rows) {
    // Cancellation noise is judged against the largest magnitude that entered
    // the row, so a dependent row cannot pivot on rounding residue.
    AffineExpr e;
    e.constant = r.constant;
    double mx = std::abs(r.constant);
    for (const auto& [v, c] : r.coeffs) {
      if (eliminated[static_cast<std::size_t>(v)]) {
        const AffineExpr& sv = sub[static_cast<std::size_t>(v)];
        e.add(sv, c);
        mx = std::max(mx, std::abs(c * sv.constant));
        for (const auto& t : sv.terms) mx = std::max(mx, std::abs(c * t.second));
      } else {
        e.add_term(v, c);
        mx = std::max(mx, std::abs(c));
      }
    }
    std::erase_if(e.terms, [&](const auto& t) { return std::abs(t.second) <= 1e-10 * mx; });
    if (e.terms.empty()) {
      if (std::abs(e.constant) > 1e-9 * std::max(1.0, mx)) return false;
      continue;
    }
    int piv = -1;
    double best = 0.0;
    for (const auto& [v, c] : e.terms) {
      if (std::abs(c) > best) {
        best = std::abs(c);
        piv = v;
      }
    }
    double cp = 0.0;
    AffineExpr x;
    x.constant = -e.constant;
    for (const auto& [v, c] : e.terms) {
      if (v == piv) {
        cp = c;
      } else {
        x.add_term(v, -c);
      }
    }
    x.constant /= cp;
    for (auto& t : x.terms) t.second /= cp;
    for (int v = 0; v < p.nvars; ++v) {
      auto& s = sub[static_cast<std::size_t>(v)];
      if (!eliminated[static_cast<std::size_t>(v)]) continue;
      for (const auto& [w, c] : s.terms) {
        if (w != piv) continue;
        const double k = c;
        s.add_term(piv, -k);
        s.add(x, k);
        break;
      }
    }
    sub[static_cast<std::size_t>(piv)] = std::move(x);
    eliminated[static_cast<std::size_t>(piv)] = 1;
  }

  std::vector<int> index(static_cast<std::size_t>(p.nvars), -1);
  int nfree = 0;
  for (int v = 0; v < p.nvars; ++v) {
    if (!eliminated[static_cast<std::size_t>(v)]) index[static_cast<std::size_t>(v)] = nfree++;
  }
  out.expr.assign(static_cast<std::size_t>(p.nvars), AffineExpr{});
  for (int v = 0; v < p.nvars; ++v) {
    AffineExpr& e = out.expr[static_cast<std::size_t>(v)];
    if (!eliminated[static_cast<std::size_t>(v)]) {
      e.add_term(index[static_cast<std::size_t>(v)], 1.0);
      continue;
    }
    e.constant = sub[static_cast<std::size_t>(v)].constant;
    for (const auto& [w, c] : sub[static_cast<std::size_t>(v)].terms) e.add_term(index[static_cast<std::size_t>(w)], c);
  }

  SdpProblem& q = out.reduced;
  q.nvars = nfree;
  q.metadata = p.metadata;
  AffineExpr obj;
  obj.constant = p.objective_constant;
  for (const auto& [v, c] : p.objective) obj.add(out.expr[static_cast<std::size_t>(v)], c);
  if (obj.terms.empty()) return false;
  q.objective = obj.terms;
  q.objective_constant = obj.constant;
  for (const auto& ab : p.blocks) {
    AffineBlock nb(ab.dim(), ab.label());
    for (int r = 0; r < ab.dim(); ++r) {
      for (int c = r; c < ab.dim(); ++c) {
        if (ab.constant()(r, c) != 0.0) nb.add_constant(r, c, ab.constant()(r, c));
      }
    }
    for (const auto& [v, list] : ab.coeffs()) {
      const AffineExpr& e = out.expr[static_cast<std::size_t>(v)];
      for (const auto& be : list) {
        if (e.constant != 0.0) nb.add_constant(be.row, be.col, be.value * e.constant);
        for (const auto& [w, c] : e.terms) nb.add_coefficient(w, be.row, be.col, be.value * c);
      }
    }
    q.blocks.push_back(std::move(nb));
  }
  for (const auto& r : p.ineq_rows) {
    AffineExpr e;
    e.constant = r.constant;
    for (const auto& [v, c] : r.coeffs) e.add(out.expr[static_cast<std::size_t>(v)], c);
    LinearRow row = LinearRow::from_expr(e, RowSense::geq_zero, r.label);
    q.ineq_rows.push_back(std::move(row));
  }
  return true;
}

// A vector killed by the constant and every coefficient matrix lies in the
// kernel of the block for all y; such blocks have no interior, so each one is
// compressed onto the orthogonal complement of that common null space.
int compress_blocks(SdpProblem& p) {
  int removed = 0;
  for (AffineBlock& ab : p.blocks) {
    const int d = ab.dim();
    if (d == 0) continue;
    MatrixXd G = ab.constant().transpose() * ab.constant();
    for (const auto& [v, list] : ab.coeffs()) {
      MatrixXd A = MatrixXd::Zero(d, d);
      for (const auto& e : list) {
        A(e.row, e.col) += e.value;
        if (e.row != e.col) A(e.col, e.row) += e.value;
      }
      G.noalias() += A.transpose() * A;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(G);
    const VectorXd& ev = es.eigenvalues();
    // Gram eigenvalues carry absolute error ~eps * max, so candidates are
    // confirmed against each matrix directly.
    const double cut = 1e-10 * std::max(ev.maxCoeff(), 1e-300);
    int k = 0;
    while (k < d && ev[k] <= cut) ++k;
    if (k == 0 || k == d) continue;
    {
      const MatrixXd N = es.eigenvectors().leftCols(k);
      double worst = (ab.constant() * N).cwiseAbs().maxCoeff();
      double scale = ab.constant().cwiseAbs().maxCoeff();
      for (const auto& [v, list] : ab.coeffs()) {
        MatrixXd A = MatrixXd::Zero(d, d);
        for (const auto& e : list) {
          A(e.row, e.col) += e.value;
          if (e.row != e.col) A(e.col, e.row) += e.value;
        }
        worst = std::max(worst, (A * N).cwiseAbs().maxCoeff());
        scale = std::max(scale, A.cwiseAbs().maxCoeff());
      }
      if (worst > 1e-12 * std::max(scale, 1.0)) continue;
    }
    const MatrixXd Q = es.eigenvectors().rightCols(d - k);
    AffineBlock nb(d - k, ab.label());
    const MatrixXd C = Q.transpose() * ab.constant() * Q;
    for (int r = 0; r < d - k; ++r) {
      for (int c = r; c < d - k; ++c) nb.add_constant(r, c, C(r, c));
    }
    for (const auto& [v, list] : ab.coeffs()) {
      MatrixXd A = MatrixXd::Zero(d, d);
      for (const auto& e : list) {
        A(e.row, e.col) += e.value;
        if (e.row != e.col) A(e.col, e.row) += e.value;
      }
      const MatrixXd R = Q.transpose() * A * Q;
      const double tiny = 1e-15 * std::max(1.0, R.cwiseAbs().maxCoeff());
      for (int r = 0; r < d - k; ++r) {
        for (int c = r; c < d - k; ++c) {
          if (std::abs(R(r, c)) > tiny) nb.add_coefficient(v, r, c, R(r, c));
        }
      }
    }
    ab = std::move(nb);
    removed += k;
  }
  return removed;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolverOptions& options) {
  problem.validate();
  SdpSolution sol;
  Elimination elim;
  if (options.presolve && !problem.eq_rows.empty() && eliminate_equalities(problem, elim)) {
    const int nrem = compress_blocks(elim.reduced);
    if (options.verbose) std::fprintf(stderr, "presolve: %d eliminated, %d kernel directions\n", problem.nvars - elim.reduced.nvars, nrem);
    Ipm ipm(elim.reduced, options);
    SdpSolution red = ipm.run();
    sol = red;
    if (!red.y.empty()) {
      sol.y.assign(static_cast<std::size_t>(problem.nvars), 0.0);
      for (int v = 0; v < problem.nvars; ++v) {
        sol.y[static_cast<std::size_t>(v)] = elim.expr[static_cast<std::size_t>(v)].evaluate(red.y);
      }
    }
  } else {
    Ipm ipm(problem, options);
    sol = ipm.run();
  }
  measure_residuals(problem, sol);
  return sol;
}

}  // namespace rankbound
