#include "rankbound/affine.hpp"

#include <algorithm>

#include "rankbound/errors.hpp"

namespace rankbound {

void AffineExpr::add_term(int var, double coeff) {
  if (coeff == 0.0) {
    return;
  }
  auto it = std::lower_bound(terms.begin(), terms.end(), var,
                             [](const std::pair<int, double>& t, int v) { return t.first < v; });
  if (it != terms.end() && it->first == var) {
    it->second += coeff;
    if (it->second == 0.0) {
      terms.erase(it);
    }
  } else {
    terms.insert(it, {var, coeff});
  }
}

void AffineExpr::add(const AffineExpr& other, double scale) {
  constant += scale * other.constant;
  for (const auto& [v, c] : other.terms) {
    add_term(v, scale * c);
  }
}

double AffineExpr::evaluate(std::span<const double> y) const {
  double s = constant;
  for (const auto& [v, c] : terms) {
    s += c * y[static_cast<std::size_t>(v)];
  }
  return s;
}

LinearRow LinearRow::from_expr(const AffineExpr& e, RowSense sense, std::string label) {
  LinearRow row;
  row.coeffs = e.terms;
  row.constant = e.constant;
  row.sense = sense;
  row.label = std::move(label);
  return row;
}

double LinearRow::evaluate(std::span<const double> y) const {
  double s = constant;
  for (const auto& [v, c] : coeffs) {
    s += c * y[static_cast<std::size_t>(v)];
  }
  return s;
}

AffineBlock::AffineBlock(int dim, std::string label)
    : dim_(dim), constant_(Eigen::MatrixXd::Zero(dim, dim)), label_(std::move(label)) {
  if (dim < 1) {
    throw EmptyBlock("block '" + label_ + "' has no rows");
  }
}

void AffineBlock::add_constant(int r, int c, double value) {
  constant_(r, c) += value;
  if (r != c) {
    constant_(c, r) += value;
  }
}

void AffineBlock::add_coefficient(int var, int r, int c, double value) {
  if (value == 0.0) {
    return;
  }
  if (r > c) {
    std::swap(r, c);
  }
  auto& list = coeffs_[var];
  for (auto& e : list) {
    if (e.row == r && e.col == c) {
      e.value += value;
      return;
    }
  }
  list.push_back({r, c, value});
}

void AffineBlock::set_entry(int r, int c, const AffineExpr& e) {
  if (r > c) {
    std::swap(r, c);
  }
  constant_(r, c) = e.constant;
  constant_(c, r) = e.constant;
  for (const auto& [v, coeff] : e.terms) {
    coeffs_[v].push_back({r, c, coeff});
  }
}

AffineExpr AffineBlock::entry(int r, int c) const {
  if (r > c) {
    std::swap(r, c);
  }
  AffineExpr e;
  e.constant = constant_(r, c);
  for (const auto& [v, list] : coeffs_) {
    for (const auto& be : list) {
      if (be.row == r && be.col == c) {
        e.add_term(v, be.value);
      }
    }
  }
  return e;
}

Eigen::MatrixXd AffineBlock::coefficient(int var) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
  auto it = coeffs_.find(var);
  if (it == coeffs_.end()) {
    return m;
  }
  for (const auto& be : it->second) {
    m(be.row, be.col) += be.value;
    if (be.row != be.col) {
      m(be.col, be.row) += be.value;
    }
  }
  return m;
}

Eigen::MatrixXd AffineBlock::evaluate(std::span<const double> y) const {
  Eigen::MatrixXd m = constant_;
  for (const auto& [v, list] : coeffs_) {
    const double yv = y[static_cast<std::size_t>(v)];
    for (const auto& be : list) {
      m(be.row, be.col) += yv * be.value;
      if (be.row != be.col) {
        m(be.col, be.row) += yv * be.value;
      }
    }
  }
  return m;
}

}  // namespace rankbound
