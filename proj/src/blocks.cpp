#include "rankbound/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "rankbound/errors.hpp"

namespace rankbound {

namespace {

int half_up(int d) { return (d + 1) / 2; }

AffineBlock sandwich_block(const MomentTable& tab, const Polynomial& g, const Polynomial& g2, int index_degree,
                           std::string label) {
  if (index_degree < 0) {
    throw EmptyBlock("localizer '" + label + "' has degree too large for level t=" + std::to_string(tab.t()));
  }
  const std::vector<Word> basis = tab.basis(index_degree);
  const int dim = static_cast<int>(basis.size());
  AffineBlock block(dim, std::move(label));
  const bool plain_right = g2.terms().size() == 1 && g2.terms().begin()->first.empty() &&
                           g2.terms().begin()->second == 1.0;
  for (int a = 0; a < dim; ++a) {
    const Word ua = involution(basis[static_cast<std::size_t>(a)]);
    for (int b = a; b < dim; ++b) {
      const Word& ub = basis[static_cast<std::size_t>(b)];
      AffineExpr e;
      for (const auto& [w, c] : g.terms()) {
        const Word left = ua * w * ub;
        if (plain_right) {
          e.add(tab.expr(left), c);
        } else {
          for (const auto& [w2, c2] : g2.terms()) {
            e.add(tab.expr(left * w2), c * c2);
          }
        }
      }
      block.set_entry(a, b, e);
    }
  }
  return block;
}

std::string row_key(const LinearRow& row) {
  // Scale so the largest coefficient is +1, then print rounded.
  double scale = 0.0;
  for (const auto& [v, c] : row.coeffs) {
    if (std::abs(c) > std::abs(scale)) {
      scale = c;
    }
  }
  if (scale == 0.0) {
    scale = row.constant == 0.0 ? 1.0 : std::abs(row.constant);
  }
  if (row.sense == RowSense::geq_zero) {
    scale = std::abs(scale);
  }
  std::string key;
  char buf[64];
  for (const auto& [v, c] : row.coeffs) {
    std::snprintf(buf, sizeof buf, "%d:%.11g;", v, c / scale);
    key += buf;
  }
  std::snprintf(buf, sizeof buf, "|%.11g", row.constant / scale);
  key += buf;
  return key;
}

void push_row(std::vector<LinearRow>& rows, std::set<std::string>& seen, LinearRow row) {
  if (row.coeffs.empty()) {
    const bool holds = row.sense == RowSense::equality ? std::abs(row.constant) <= kMergeTolerance
                                                       : row.constant >= -kMergeTolerance;
    if (holds) {
      return;
    }
    // Kept as an explicit contradiction so the solver reports infeasibility.
  }
  if (seen.insert(row_key(row)).second) {
    rows.push_back(std::move(row));
  }
}

}  // namespace

AffineBlock moment_block(const MomentTable& tab, std::string label) {
  return sandwich_block(tab, Polynomial(1.0), Polynomial(1.0), tab.t(), std::move(label));
}

AffineBlock localizing_block(const MomentTable& tab, const Polynomial& g, std::string label) {
  if (g.is_zero()) {
    throw EmptyBlock("zero localizing polynomial");
  }
  if (label.empty()) {
    label = "loc(" + g.str() + ")";
  }
  return sandwich_block(tab, g, Polynomial(1.0), tab.t() - half_up(g.degree()), std::move(label));
}

AffineBlock bilinear_block(const MomentTable& tab, const Polynomial& g, const Polynomial& g2, std::string label) {
  if (g.is_zero() || g2.is_zero()) {
    throw EmptyBlock("zero polynomial in bilinear block");
  }
  if (label.empty()) {
    label = "bilin(" + g.str() + ", " + g2.str() + ")";
  }
  return sandwich_block(tab, g, g2, tab.t() - half_up(g.degree() + g2.degree()), std::move(label));
}

std::vector<LinearRow> ideal_rows(const MomentTable& tab, const std::vector<Polynomial>& T) {
  std::vector<LinearRow> rows;
  std::set<std::string> seen;
  for (const Polynomial& h : T) {
    if (h.is_zero()) {
      continue;
    }
    if (h.degree() > tab.level()) {
      throw LevelError("ideal generator " + h.str() + " exceeds degree 2t");
    }
    for (const Word& p : tab.basis(tab.level() - h.degree())) {
      AffineExpr e;
      for (const auto& [w, c] : h.terms()) {
        e.add(tab.expr(p * w), c);
      }
      push_row(rows, seen, LinearRow::from_expr(e, RowSense::equality, "ideal(" + h.str() + ")"));
    }
  }
  return rows;
}

std::vector<LinearRow> scalar_positivity_rows(const MomentTable& tab, const std::vector<Polynomial>& S) {
  if (!tab.mode().commutative) {
    throw ModeError("scalar positivity rows require commutative mode");
  }
  std::vector<Polynomial> gs{Polynomial(1.0)};
  gs.insert(gs.end(), S.begin(), S.end());
  std::vector<LinearRow> rows;
  std::set<std::string> seen;
  for (const Polynomial& g : gs) {
    if (g.is_zero() || g.degree() > tab.level()) {
      continue;
    }
    for (const Word& u : tab.basis(tab.level() - g.degree())) {
      AffineExpr e;
      for (const auto& [w, c] : g.terms()) {
        e.add(tab.expr(w * u), c);
      }
      push_row(rows, seen, LinearRow::from_expr(e, RowSense::geq_zero, "pos(" + g.str() + ")"));
    }
  }
  return rows;
}

std::vector<Word> fiber(const Word& m) {
  std::vector<int> letters = m.letters();
  std::sort(letters.begin(), letters.end());
  std::vector<Word> out;
  do {
    out.emplace_back(std::span<const int>(letters));
  } while (std::next_permutation(letters.begin(), letters.end()));
  return out;
}

Eigen::MatrixXd tensor_constant(const Eigen::MatrixXd& A, int l) {
  const int n = static_cast<int>(A.rows());
  const std::vector<Word> monos = words_of_degree(n, l, true);
  std::vector<std::vector<Word>> fibers;
  fibers.reserve(monos.size());
  for (const Word& m : monos) {
    fibers.push_back(fiber(m));
  }
  const int dim = static_cast<int>(monos.size());
  Eigen::MatrixXd out(dim, dim);
  for (int a = 0; a < dim; ++a) {
    for (int b = a; b < dim; ++b) {
      double s = 0.0;
      for (const Word& w : fibers[static_cast<std::size_t>(a)]) {
        for (const Word& w2 : fibers[static_cast<std::size_t>(b)]) {
          double prod = 1.0;
          for (int k = 0; k < l; ++k) {
            prod *= A(w[k] - 1, w2[k] - 1);
          }
          s += prod;
        }
      }
      s /= static_cast<double>(fibers[static_cast<std::size_t>(a)].size() * fibers[static_cast<std::size_t>(b)].size());
      out(a, b) = s;
      out(b, a) = s;
    }
  }
  return out;
}

AffineBlock tensor_block(const MomentTable& tab, const Eigen::MatrixXd& A, int l) {
  if (!tab.mode().commutative) {
    throw ModeError("tensor constraints require commutative mode");
  }
  if (l < 2 || l > tab.t()) {
    throw LevelError("tensor level l=" + std::to_string(l) + " outside [2, t]");
  }
  if (A.rows() != A.cols() || A.rows() > tab.n()) {
    throw LevelError("tensor block matrix does not match the table");
  }
  const int n = static_cast<int>(A.rows());
  const std::vector<Word> monos = words_of_degree(n, l, true);
  const Eigen::MatrixXd c = tensor_constant(A, l);
  const int dim = static_cast<int>(monos.size());
  AffineBlock block(dim, "tensor(l=" + std::to_string(l) + ")");
  for (int a = 0; a < dim; ++a) {
    for (int b = a; b < dim; ++b) {
      AffineExpr e;
      e.add(tab.expr(monos[static_cast<std::size_t>(a)] * monos[static_cast<std::size_t>(b)]), -1.0);
      e.constant += c(a, b);
      block.set_entry(a, b, e);
    }
  }
  return block;
}

}  // namespace rankbound
