#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace rankbound {

// constant + sum_v coeff_v * y_v over moment variables y. Terms sorted by id, nonzero.
struct AffineExpr {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;

  void add(const AffineExpr& other, double scale = 1.0);
  void add_term(int var, double coeff);
  double evaluate(std::span<const double> y) const;
  bool is_constant() const { return terms.empty(); }

  friend bool operator==(const AffineExpr&, const AffineExpr&) = default;
};

enum class RowSense { equality, geq_zero };

// coeffs . y + constant  (== 0 or >= 0).
struct LinearRow {
  std::vector<std::pair<int, double>> coeffs;
  double constant = 0.0;
  RowSense sense = RowSense::equality;
  std::string label;

  static LinearRow from_expr(const AffineExpr& e, RowSense sense, std::string label = {});
  double evaluate(std::span<const double> y) const;
};

struct BlockEntry {
  int row;
  int col;  // row <= col
  double value;
};

// Symmetric matrix constant + sum_v y_v * coeffs[v], required to be PSD.
class AffineBlock {
 public:
  AffineBlock() = default;
  AffineBlock(int dim, std::string label);

  int dim() const { return dim_; }
  const std::string& label() const { return label_; }
  const Eigen::MatrixXd& constant() const { return constant_; }
  // Upper-triangular entries per variable.
  const std::map<int, std::vector<BlockEntry>>& coeffs() const { return coeffs_; }

  // Sets entries (r, c) and (c, r) to the affine expression e. Each entry is set once.
  void set_entry(int r, int c, const AffineExpr& e);
  void add_constant(int r, int c, double value);
  void add_coefficient(int var, int r, int c, double value);

  AffineExpr entry(int r, int c) const;
  Eigen::MatrixXd coefficient(int var) const;
  Eigen::MatrixXd evaluate(std::span<const double> y) const;

 private:
  int dim_ = 0;
  Eigen::MatrixXd constant_;
  std::map<int, std::vector<BlockEntry>> coeffs_;
  std::string label_;
};

}  // namespace rankbound
