#pragma once

#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rankbound/affine.hpp"
#include "rankbound/polynomial.hpp"
#include "rankbound/word.hpp"

namespace rankbound {

inline constexpr double kMergeTolerance = 1e-12;

// Eliminates one letter: x_letter == constant + sum_j coeff_j x_j modulo the trace
// (or commutative) identities. Only valid in tracial or commutative mode.
struct LetterSubstitution {
  int letter = 0;
  double constant = 0.0;
  std::vector<std::pair<int, double>> linear;
};

class MomentTable {
 public:
  using Fix = std::pair<Word, double>;

  MomentTable(int n, int t, EquivalenceMode mode, const std::vector<Fix>& fixes = {},
              std::optional<LetterSubstitution> substitution = std::nullopt);

  int n() const { return n_; }
  int t() const { return t_; }
  int level() const { return 2 * t_; }
  EquivalenceMode mode() const { return mode_; }
  const std::optional<LetterSubstitution>& substitution() const { return subst_; }

  int num_variables() const { return static_cast<int>(vars_.size()); }
  const Word& variable_word(int id) const { return vars_[static_cast<std::size_t>(id)]; }
  // -1 when the class is fixed or unknown.
  int variable_id(const Word& w) const;
  std::optional<double> fixed_value(const Word& w) const;
  const std::vector<Fix>& fixed() const { return fixed_list_; }

  // Fix equations that did not reduce to a single class; emitted as equality rows.
  const std::vector<LinearRow>& residual_rows() const { return residual_rows_; }

  // L(w) as an affine expression in the variables.
  AffineExpr expr(const Word& w) const;
  AffineExpr expr(const Polynomial& p) const;

  // Letters carrying moment-matrix indices (all letters except a substituted one).
  const std::vector<int>& active_letters() const { return active_; }
  // Words (or sorted monomials) of degree <= d over the active letters, graded-lex order.
  std::vector<Word> basis(int d) const;
  // Same, degree exactly d.
  std::vector<Word> basis_exact(int d) const;

  // Numeric L(w) given values for the variables.
  double evaluate(const Word& w, std::span<const double> y) const;

  // Expansion into canonical active-letter classes, before fixes are applied.
  void expand(const Word& w, double coeff, std::unordered_map<Word, double, WordHash>& out) const;

 private:
  int n_;
  int t_;
  EquivalenceMode mode_;
  std::optional<LetterSubstitution> subst_;
  std::vector<int> active_;
  std::vector<Word> vars_;
  std::unordered_map<Word, int, WordHash> var_index_;
  std::unordered_map<Word, double, WordHash> fixed_;
  std::vector<Fix> fixed_list_;
  std::vector<LinearRow> residual_rows_;
};

}  // namespace rankbound
