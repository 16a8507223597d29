#include "rankbound/moment_table.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rankbound/errors.hpp"

namespace rankbound {

namespace {

Word relabel(const Word& w, const std::vector<int>& alphabet) {
  Word out;
  for (int i = 0; i < w.degree(); ++i) {
    out.push_back(alphabet[static_cast<std::size_t>(w[i] - 1)]);
  }
  return out;
}

void check_word(const Word& w, int n, int level) {
  if (w.max_letter() > n) {
    throw DegreeError("word " + w.str() + " uses a symbol beyond n=" + std::to_string(n));
  }
  if (w.degree() > level) {
    throw LevelError("word " + w.str() + " exceeds degree " + std::to_string(level));
  }
}

}  // namespace

MomentTable::MomentTable(int n, int t, EquivalenceMode mode, const std::vector<Fix>& fixes,
                         std::optional<LetterSubstitution> substitution)
    : n_(n), t_(t), mode_(mode), subst_(std::move(substitution)) {
  if (n < 1 || t < 0) {
    throw LevelError("moment table needs n >= 1 and t >= 0");
  }
  if (2 * t > kMaxWordDegree) {
    throw DegreeError("level 2t=" + std::to_string(2 * t) + " exceeds degree cap");
  }
  if (subst_) {
    if (!mode_.commutative && !mode_.tracial) {
      throw ModeError("letter substitution requires tracial or commutative mode");
    }
    if (subst_->letter < 1 || subst_->letter > n) {
      throw DegreeError("substituted letter out of range");
    }
    for (const auto& [j, c] : subst_->linear) {
      if (j == subst_->letter || j < 1 || j > n) {
        throw DegreeError("invalid letter in substitution");
      }
    }
  }
  for (int i = 1; i <= n; ++i) {
    if (!subst_ || subst_->letter != i) {
      active_.push_back(i);
    }
  }

  // All canonical classes over the active letters.
  std::vector<Word> classes;
  for (const Word& w : enumerate_words(static_cast<int>(active_.size()), 2 * t, mode_)) {
    classes.push_back(relabel(w, active_));
  }

  // Fix equations: sum_c coeff_c L(c) = value.
  struct Equation {
    std::unordered_map<Word, double, WordHash> terms;
    double value;
    bool used = false;
  };
  std::vector<Equation> eqs;
  for (const auto& [w, value] : fixes) {
    check_word(w, n, 2 * t);
    if (!std::isfinite(value)) {
      throw ConflictingFix("non-finite fixed value for " + w.str());
    }
    Equation e{{}, value};
    expand(w, 1.0, e.terms);
    std::erase_if(e.terms, [](const auto& kv) { return kv.second == 0.0; });
    eqs.push_back(std::move(e));
  }

  const Word one;
  bool progress = true;
  while (progress) {
    progress = false;
    for (auto& e : eqs) {
      if (e.used) {
        continue;
      }
      double rhs = e.value;
      int unknown = 0;
      Word target;
      double target_coeff = 0.0;
      for (const auto& [c, coeff] : e.terms) {
        auto it = fixed_.find(c);
        if (it != fixed_.end()) {
          rhs -= coeff * it->second;
        } else {
          ++unknown;
          target = c;
          target_coeff = coeff;
        }
      }
      if (unknown == 0) {
        if (std::abs(rhs) > kMergeTolerance) {
          throw ConflictingFix("conflicting fixed values (discrepancy " + std::to_string(rhs) + ")");
        }
        e.used = true;
        progress = true;
      } else if (unknown == 1 && !(target == one)) {
        fixed_.emplace(target, rhs / target_coeff);
        fixed_list_.emplace_back(target, rhs / target_coeff);
        e.used = true;
        progress = true;
      }
    }
  }

  // Variables: L(1) first, then unfixed classes in graded-lex order.
  if (fixed_.count(one) != 0) {
    throw ConflictingFix("L(1) cannot be fixed");
  }
  for (const Word& c : classes) {
    if (fixed_.count(c) == 0) {
      var_index_.emplace(c, static_cast<int>(vars_.size()));
      vars_.push_back(c);
    }
  }

  for (const auto& e : eqs) {
    if (e.used) {
      continue;
    }
    AffineExpr ex;
    ex.constant = -e.value;
    for (const auto& [c, coeff] : e.terms) {
      auto it = fixed_.find(c);
      if (it != fixed_.end()) {
        ex.constant += coeff * it->second;
      } else {
        ex.add_term(var_index_.at(c), coeff);
      }
    }
    residual_rows_.push_back(LinearRow::from_expr(ex, RowSense::equality, "fix"));
  }
  std::sort(fixed_list_.begin(), fixed_list_.end(),
            [](const Fix& a, const Fix& b) { return a.first < b.first; });
}

void MomentTable::expand(const Word& w, double coeff,
                         std::unordered_map<Word, double, WordHash>& out) const {
  const Word c = canonical_word(w, mode_);
  if (!subst_) {
    out[c] += coeff;
    return;
  }
  std::vector<int> letters = c.letters();
  auto pos = std::find(letters.begin(), letters.end(), subst_->letter);
  if (pos == letters.end()) {
    out[c] += coeff;
    return;
  }
  // Rotate so the substituted letter comes last, then drop it.
  std::vector<int> rest(pos + 1, letters.end());
  rest.insert(rest.end(), letters.begin(), pos);
  const Word base{std::span<const int>(rest)};
  if (subst_->constant != 0.0) {
    expand(base, coeff * subst_->constant, out);
  }
  for (const auto& [j, cj] : subst_->linear) {
    expand(base * Word{j}, coeff * cj, out);
  }
}

int MomentTable::variable_id(const Word& w) const {
  auto it = var_index_.find(canonical_word(w, mode_));
  return it == var_index_.end() ? -1 : it->second;
}

std::optional<double> MomentTable::fixed_value(const Word& w) const {
  auto it = fixed_.find(canonical_word(w, mode_));
  if (it == fixed_.end()) {
    return std::nullopt;
  }
  return it->second;
}

AffineExpr MomentTable::expr(const Word& w) const {
  check_word(w, n_, 2 * t_);
  std::unordered_map<Word, double, WordHash> classes;
  expand(w, 1.0, classes);
  AffineExpr out;
  for (const auto& [c, coeff] : classes) {
    auto it = fixed_.find(c);
    if (it != fixed_.end()) {
      out.constant += coeff * it->second;
    } else {
      out.add_term(var_index_.at(c), coeff);
    }
  }
  return out;
}

AffineExpr MomentTable::expr(const Polynomial& p) const {
  AffineExpr out;
  for (const auto& [w, c] : p.terms()) {
    out.add(expr(w), c);
  }
  return out;
}

std::vector<Word> MomentTable::basis_exact(int d) const {
  std::vector<Word> out;
  if (d < 0) {
    return out;
  }
  for (const Word& w : words_of_degree(static_cast<int>(active_.size()), d, mode_.commutative)) {
    out.push_back(relabel(w, active_));
  }
  return out;
}

std::vector<Word> MomentTable::basis(int d) const {
  std::vector<Word> out;
  for (int k = 0; k <= d; ++k) {
    std::vector<Word> layer = basis_exact(k);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

double MomentTable::evaluate(const Word& w, std::span<const double> y) const {
  return expr(w).evaluate(y);
}

}  // namespace rankbound
