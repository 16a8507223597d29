#include "rankbound/hierarchies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "rankbound/blocks.hpp"
#include "rankbound/errors.hpp"
#include "rankbound/instances.hpp"

namespace rankbound {

const char* to_string(RankKind k) {
  switch (k) {
    case RankKind::cpsd:
      return "cpsd";
    case RankKind::cp:
      return "cp";
    case RankKind::nonneg:
      return "nonneg";
    case RankKind::psd:
      return "psd";
    case RankKind::nuclear:
      return "nuclear";
  }
  return "?";
}

RankKind parse_kind(const std::string& s) {
  for (RankKind k : {RankKind::cpsd, RankKind::cp, RankKind::nonneg, RankKind::psd, RankKind::nuclear}) {
    if (s == to_string(k)) return k;
  }
  throw ParamRange("unknown rank kind '" + s + "'");
}

std::string Variants::str() const {
  std::vector<std::string> parts;
  if (dagger) parts.emplace_back("dagger");
  if (!V.empty()) parts.push_back("V" + std::to_string(V.size()));
  for (int l : tensor_levels) parts.push_back("tensor" + std::to_string(l));
  for (const auto& [a, b] : bilinear_pairs) parts.push_back("bilin" + std::to_string(a) + ":" + std::to_string(b));
  if (bilinear_cross) parts.emplace_back("bilincross");
  if (kernel) parts.emplace_back("kernel");
  if (extra_monomial_localizers) parts.emplace_back("monomials");
  if (psd_ideal_rows) parts.emplace_back("idealrows");
  if (parts.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "+" : "") + parts[i];
  return out;
}

namespace {

Polynomial x(int i) { return Polynomial::variable(i); }
Polynomial xx(int i, int j) { return Polynomial(Word{i, j}); }

void check_finite(const Eigen::MatrixXd& A) {
  if (A.size() == 0) throw ParamRange("empty matrix");
  for (Eigen::Index i = 0; i < A.size(); ++i) {
    if (!std::isfinite(A.data()[i])) throw ParamRange("matrix has non-finite entries");
  }
}

void check_level(int t) {
  if (t < 1) throw LevelError("level t must be at least 1");
}

std::vector<std::string> symmetric_warnings(const Eigen::MatrixXd& A) {
  std::vector<std::string> w;
  if (A.rows() != A.cols()) throw ParamRange("matrix must be square");
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    if (A(i, i) < 0) throw ParamRange("negative diagonal entry A_" + std::to_string(i + 1) + std::to_string(i + 1));
  }
  const MatrixTags tags = checks(A);
  if (!tags.psd) w.emplace_back("matrix is not positive semidefinite");
  if (!tags.nonneg) w.emplace_back("matrix has negative entries");
  return w;
}

Polynomial gv(const Eigen::MatrixXd& A, const Eigen::VectorXd& v) {
  if (v.size() != A.rows()) throw ParamRange("localizing vector has wrong length");
  Polynomial g(v.dot(A * v));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      g.add_term(Word{static_cast<int>(i) + 1, static_cast<int>(j) + 1}, -v[i] * v[j]);
    }
  }
  return g;
}

struct Assembly {
  std::vector<Polynomial> localizers;
  std::vector<std::pair<Polynomial, Polynomial>> bilinear;
  std::vector<Polynomial> ideal;
  std::vector<Polynomial> positivity;  // S for L(gu) >= 0 rows
  bool positivity_rows = false;
  std::vector<int> tensor_levels;
};

BuiltProblem assemble(MomentTable tab, Assembly& as, const BoundRequest& req, std::vector<std::string> warnings) {
  BuiltProblem bp;
  bp.warnings = std::move(warnings);
  SdpProblem& p = bp.problem;
  p.nvars = tab.num_variables();
  p.objective = {{0, 1.0}};
  p.metadata["kind"] = to_string(req.kind);
  p.metadata["t"] = std::to_string(req.t);
  p.metadata["variants"] = req.variants.str();

  p.blocks.push_back(moment_block(tab));
  for (const Polynomial& g : as.localizers) {
    try {
      p.blocks.push_back(localizing_block(tab, g));
    } catch (const EmptyBlock& e) {
      bp.warnings.emplace_back(std::string("skipped localizer: ") + e.what());
    }
  }
  for (const auto& [g, g2] : as.bilinear) {
    try {
      p.blocks.push_back(bilinear_block(tab, g, g2));
    } catch (const EmptyBlock& e) {
      bp.warnings.emplace_back(std::string("skipped bilinear block: ") + e.what());
    }
  }
  for (int l : as.tensor_levels) {
    p.blocks.push_back(tensor_block(tab, req.A, l));
  }
  for (LinearRow& r : ideal_rows(tab, as.ideal)) p.add_row(std::move(r));
  if (as.positivity_rows) {
    for (LinearRow& r : scalar_positivity_rows(tab, as.positivity)) p.add_row(std::move(r));
  }
  for (const LinearRow& r : tab.residual_rows()) p.add_row(r);
  bp.localizers = as.localizers;
  bp.table.emplace(std::move(tab));
  return bp;
}

void add_bilinear_pairs(const BoundRequest& req, Assembly& as) {
  for (const auto& [a, b] : req.variants.bilinear_pairs) {
    const int n = static_cast<int>(as.localizers.size());
    if (a < 0 || b < 0 || a >= n || b >= n) {
      throw ParamRange("bilinear pair index out of range (localizer count " + std::to_string(n) + ")");
    }
    as.bilinear.emplace_back(as.localizers[static_cast<std::size_t>(a)], as.localizers[static_cast<std::size_t>(b)]);
  }
}

}  // namespace

BuiltProblem build_cpsd(const BoundRequest& req) {
  check_level(req.t);
  check_finite(req.A);
  const Eigen::MatrixXd& A = req.A;
  auto warnings = symmetric_warnings(A);
  const int n = static_cast<int>(A.rows());
  std::vector<MomentTable::Fix> fixes;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) fixes.emplace_back(Word{i + 1, j + 1}, A(i, j));
  }
  MomentTable tab(n, req.t, EquivalenceMode::symmetric_tracial(), fixes);
  Assembly as;
  for (int i = 0; i < n; ++i) {
    as.localizers.push_back(std::sqrt(A(i, i)) * x(i + 1) - xx(i + 1, i + 1));
  }
  for (const auto& v : req.variants.V) as.localizers.push_back(gv(A, v));
  add_bilinear_pairs(req, as);
  if (req.variants.kernel) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()));
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    for (int k = 0; k < n; ++k) {
      if (std::abs(es.eigenvalues()[k]) <= 1e-9 * scale) {
        Polynomial h;
        for (int i = 0; i < n; ++i) {
          const double c = es.eigenvectors()(i, k);
          if (std::abs(c) > 1e-14) h.add_term(Word{i + 1}, c);
        }
        as.ideal.push_back(h);
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (A(i, j) == 0.0) as.ideal.push_back(xx(i + 1, j + 1));
      }
    }
  }
  return assemble(std::move(tab), as, req, std::move(warnings));
}

BuiltProblem build_cp(const BoundRequest& req) {
  check_level(req.t);
  check_finite(req.A);
  const Eigen::MatrixXd& A = req.A;
  auto warnings = symmetric_warnings(A);
  const int n = static_cast<int>(A.rows());
  std::vector<MomentTable::Fix> fixes;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) fixes.emplace_back(Word{i + 1, j + 1}, A(i, j));
  }
  MomentTable tab(n, req.t, EquivalenceMode::commutative_mode(), fixes);
  Assembly as;
  for (int i = 0; i < n; ++i) as.localizers.push_back(std::sqrt(A(i, i)) * x(i + 1) - xx(i + 1, i + 1));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) as.localizers.push_back(A(i, j) - xx(i + 1, j + 1));
  }
  as.positivity = as.localizers;
  for (const auto& v : req.variants.V) as.localizers.push_back(gv(A, v));
  if (req.variants.extra_monomial_localizers) {
    for (int i = 0; i < n; ++i) as.localizers.push_back(x(i + 1));
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) as.localizers.push_back(xx(i + 1, j + 1));
    }
  }
  add_bilinear_pairs(req, as);
  std::set<int> levels(req.variants.tensor_levels.begin(), req.variants.tensor_levels.end());
  if (req.variants.dagger) {
    as.positivity_rows = true;
    for (int l = 2; l <= req.t; ++l) levels.insert(l);
  }
  as.tensor_levels.assign(levels.begin(), levels.end());
  return assemble(std::move(tab), as, req, std::move(warnings));
}

BuiltProblem build_nonneg(const BoundRequest& req) {
  check_level(req.t);
  check_finite(req.A);
  const Eigen::MatrixXd& A = req.A;
  std::vector<std::string> warnings;
  if (A.minCoeff() < 0) warnings.emplace_back("matrix has negative entries");
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  std::vector<MomentTable::Fix> fixes;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) fixes.emplace_back(Word{i + 1, m + j + 1}, A(i, j));
  }
  MomentTable tab(m + n, req.t, EquivalenceMode::commutative_mode(), fixes);
  Assembly as;
  const double amax = std::sqrt(std::max(0.0, A.maxCoeff()));
  for (int k = 1; k <= m + n; ++k) as.localizers.push_back(amax * x(k) - xx(k, k));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) as.localizers.push_back(A(i, j) - xx(i + 1, m + j + 1));
  }
  as.positivity = as.localizers;
  as.positivity_rows = req.variants.dagger;
  add_bilinear_pairs(req, as);
  return assemble(std::move(tab), as, req, std::move(warnings));
}

BuiltProblem build_psd(const BoundRequest& req) {
  check_level(req.t);
  check_finite(req.A);
  const Eigen::MatrixXd& A = req.A;
  std::vector<std::string> warnings;
  if (A.minCoeff() < 0) warnings.emplace_back("matrix has negative entries");
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  std::vector<MomentTable::Fix> fixes;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) fixes.emplace_back(Word{i + 1, m + j + 1}, A(i, j));
  }
  std::optional<LetterSubstitution> subst;
  if (!req.variants.psd_ideal_rows) {
    LetterSubstitution s;
    s.letter = m;
    s.constant = 1.0;
    for (int i = 1; i < m; ++i) s.linear.emplace_back(i, -1.0);
    subst = s;
  }
  MomentTable tab(m + n, req.t, EquivalenceMode::symmetric_tracial(), fixes, subst);
  Assembly as;
  for (int i = 1; i <= m; ++i) as.localizers.push_back(x(i) - xx(i, i));
  const Eigen::VectorXd colsum = A.colwise().sum().transpose();
  for (int j = 0; j < n; ++j) as.localizers.push_back(colsum[j] * x(m + j + 1) - xx(m + j + 1, m + j + 1));
  if (req.variants.psd_ideal_rows) {
    Polynomial h(1.0);
    for (int i = 1; i <= m; ++i) h -= x(i);
    as.ideal.push_back(h);
  }
  add_bilinear_pairs(req, as);
  if (req.variants.bilinear_cross) {
    for (int i = 1; i <= m; ++i) {
      for (int j = 0; j < n; ++j) as.bilinear.emplace_back(x(i), colsum[j] - x(m + j + 1));
    }
  }
  return assemble(std::move(tab), as, req, std::move(warnings));
}

BuiltProblem build_nuclear(const BoundRequest& req) {
  check_level(req.t);
  check_finite(req.A);
  const Eigen::MatrixXd& A = req.A;
  std::vector<std::string> warnings;
  if (A.minCoeff() < 0) warnings.emplace_back("matrix has negative entries");
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  std::vector<MomentTable::Fix> fixes;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) fixes.emplace_back(Word{i + 1, m + j + 1}, A(i, j));
  }
  MomentTable tab(m + n, req.t, EquivalenceMode::commutative_mode(), fixes);
  Assembly as;
  for (int k = 1; k <= m + n; ++k) as.localizers.push_back(x(k));
  Polynomial h1(-1.0);
  Polynomial h2(-1.0);
  for (int i = 1; i <= m; ++i) h1 += xx(i, i);
  for (int j = 1; j <= n; ++j) h2 += xx(m + j, m + j);
  as.ideal = {h1, h2};
  add_bilinear_pairs(req, as);
  return assemble(std::move(tab), as, req, std::move(warnings));
}

BuiltProblem build(const BoundRequest& req) {
  switch (req.kind) {
    case RankKind::cpsd:
      return build_cpsd(req);
    case RankKind::cp:
      return build_cp(req);
    case RankKind::nonneg:
      return build_nonneg(req);
    case RankKind::psd:
      return build_psd(req);
    case RankKind::nuclear:
      return build_nuclear(req);
  }
  throw ModeError("unknown kind");
}

SdpProblem tau_sos(const Eigen::MatrixXd& A, RankKind kind) {
  check_finite(A);
  if (kind != RankKind::cp && kind != RankKind::nonneg) {
    throw ModeError("tau_sos is defined for cp and nonneg");
  }
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (kind == RankKind::cp && m != n) throw ParamRange("tau_cp^sos needs a square matrix");
  const int N = m * n;
  auto idx = [n](int i, int j) { return i * n + j; };
  auto pair_id = [N](int p, int q) {
    if (p > q) std::swap(p, q);
    return p * N + q;
  };
  std::vector<int> parent(static_cast<std::size_t>(N) * N);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  };
  for (int i = 0; i < m; ++i) {
    for (int k = i + 1; k < m; ++k) {
      for (int j = 0; j < n; ++j) {
        for (int l = j + 1; l < n; ++l) {
          const int a = find(pair_id(idx(i, j), idx(k, l)));
          const int b = find(pair_id(idx(i, l), idx(k, j)));
          if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
        }
      }
    }
  }
  // Variable 0 is alpha; each class of X entries gets one variable.
  std::vector<int> var_of(static_cast<std::size_t>(N) * N, -1);
  int nv = 1;
  auto xvar = [&](int p, int q) {
    const int root = find(pair_id(p, q));
    int& v = var_of[static_cast<std::size_t>(root)];
    if (v < 0) v = nv++;
    return v;
  };
  SdpProblem prob;
  prob.objective = {{0, 1.0}};
  prob.metadata["kind"] = std::string("tau_sos_") + to_string(kind);
  AffineBlock main(N + 1, "tau_main");
  main.add_coefficient(0, 0, 0, 1.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) main.add_constant(0, idx(i, j) + 1, A(i, j));
  }
  for (int p = 0; p < N; ++p) {
    for (int q = p; q < N; ++q) main.add_coefficient(xvar(p, q), p + 1, q + 1, 1.0);
  }
  prob.blocks.push_back(std::move(main));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      LinearRow r;
      r.coeffs = {{xvar(idx(i, j), idx(i, j)), -1.0}};
      r.constant = A(i, j) * A(i, j);
      r.sense = RowSense::geq_zero;
      r.label = "diag_bound";
      prob.add_row(std::move(r));
    }
  }
  if (kind == RankKind::cp) {
    AffineBlock kron(N, "tau_kron");
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          for (int l = 0; l < n; ++l) {
            const int p = idx(i, j);
            const int q = idx(k, l);
            if (p > q) continue;
            kron.add_constant(p, q, A(i, k) * A(j, l));
            kron.add_coefficient(xvar(p, q), p, q, -1.0);
          }
        }
      }
    }
    prob.blocks.push_back(std::move(kron));
  }
  prob.nvars = nv;
  return prob;
}

double analytic_cpsd(const Eigen::MatrixXd& A) {
  check_finite(A);
  if (A.rows() != A.cols()) throw ParamRange("analytic_cpsd needs a square matrix");
  double s = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    if (A(i, i) < 0) throw ParamRange("negative diagonal entry");
    s += std::sqrt(A(i, i));
  }
  const double total = A.sum();
  if (total == 0.0 || A.cwiseAbs().maxCoeff() == 0.0) throw ZeroMatrix("analytic bound of the zero matrix");
  return s * s / total;
}

double analytic_psd(const Eigen::MatrixXd& A) {
  check_finite(A);
  const Eigen::VectorXd colsum = A.colwise().sum().transpose();
  for (Eigen::Index j = 0; j < colsum.size(); ++j) {
    if (colsum[j] <= 0.0) throw ZeroColumn("column " + std::to_string(j + 1) + " has zero sum");
  }
  double s = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    double best = 0.0;
    for (Eigen::Index j = 0; j < A.cols(); ++j) best = std::max(best, A(i, j) / colsum[j]);
    s += best;
  }
  return s;
}

namespace {

// Integer vectors with entries in [-k, k] and max |entry| == k, primitive, first nonzero positive.
std::vector<Eigen::VectorXd> integer_shell(int n, int k) {
  std::vector<Eigen::VectorXd> out;
  std::vector<int> v(static_cast<std::size_t>(n), -k);
  while (true) {
    int mx = 0;
    int g = 0;
    int first = 0;
    for (int e : v) {
      mx = std::max(mx, std::abs(e));
      g = std::gcd(g, std::abs(e));
      if (first == 0) first = e;
    }
    if (mx == k && g == 1 && first > 0) {
      Eigen::VectorXd u(n);
      for (int i = 0; i < n; ++i) u[i] = v[static_cast<std::size_t>(i)];
      out.push_back(u.normalized());
    }
    int pos = n - 1;
    while (pos >= 0 && v[static_cast<std::size_t>(pos)] == k) {
      v[static_cast<std::size_t>(pos)] = -k;
      --pos;
    }
    if (pos < 0) break;
    ++v[static_cast<std::size_t>(pos)];
  }
  return out;
}

// Fibonacci points on the upper hemisphere of S^2 (z > 0 half, or z == 0 with a canonical sign).
std::vector<Eigen::VectorXd> fibonacci_hemisphere(int count, double offset) {
  std::vector<Eigen::VectorXd> out;
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = (i + offset) / count;  // in (0, 1)
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double th = golden * i + offset;
    Eigen::VectorXd u(3);
    u << r * std::cos(th), r * std::sin(th), z;
    out.push_back(u.normalized());
  }
  return out;
}

}  // namespace

std::vector<Eigen::VectorXd> sphere_grid(int n, int k) {
  if (n < 1 || k < 1) throw ParamRange("sphere_grid needs n >= 1 and k >= 1");
  std::vector<Eigen::VectorXd> out = integer_shell(n, 1);
  for (int j = 2; j <= k; ++j) {
    std::vector<Eigen::VectorXd> more;
    if (n == 3) {
      more = fibonacci_hemisphere(8 * j, 0.5 / j);
    } else if (n > 1) {
      more = integer_shell(n, j);
    }
    out.insert(out.end(), more.begin(), more.end());
  }
  return out;
}

std::map<std::string, double> baselines(RankKind kind, const Eigen::MatrixXd& A, const SolverOptions& opts) {
  std::map<std::string, double> out;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  const double thr = 1e-9 * (sv.size() ? sv[0] : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > thr) ++rank;
  }
  out["rank"] = rank;
  auto try_tau = [&](RankKind k, const std::string& name) {
    const SdpSolution sol = solve(tau_sos(A, k), opts);
    if (sol.status == SolveStatus::optimal) out[name] = sol.primal_objective;
  };
  switch (kind) {
    case RankKind::cpsd:
      out["sqrt_rank"] = std::sqrt(static_cast<double>(rank));
      if (A.rows() == A.cols() && A.sum() > 0) out["analytic_cpsd"] = analytic_cpsd(A);
      break;
    case RankKind::cp:
      if (A.rows() == A.cols() && A.sum() > 0) out["analytic_cpsd"] = analytic_cpsd(A);
      if (A.rows() == A.cols()) try_tau(RankKind::cp, "tau_cp_sos");
      break;
    case RankKind::nonneg:
      try_tau(RankKind::nonneg, "tau_plus_sos");
      break;
    case RankKind::psd:
      out["sqrt_rank"] = std::sqrt(static_cast<double>(rank));
      if ((A.colwise().sum().array() > 0).all()) out["analytic_psd"] = analytic_psd(A);
      break;
    case RankKind::nuclear:
      out["frobenius"] = A.norm();
      break;
  }
  return out;
}

BoundResult compute_bound(const BoundRequest& req, const BoundOptions& options) {
  BuiltProblem bp = build(req);
  BoundResult res;
  res.kind = req.kind;
  res.t = req.t;
  res.variants = req.variants.str();
  res.warnings = bp.warnings;
  res.nvars = bp.problem.nvars;
  for (const auto& b : bp.problem.blocks) res.block_dims.push_back(b.dim());
  res.solution = solve(bp.problem, options.solver);
  res.status = res.solution.status;
  if (res.status == SolveStatus::optimal) {
    res.value = res.solution.primal_objective;
    if (bp.table) res.flat = flatness(res.solution, *bp.table, options.rank_tol);
  }
  if (options.baselines) res.baselines = baselines(req.kind, req.A, options.solver);
  return res;
}

}  // namespace rankbound
