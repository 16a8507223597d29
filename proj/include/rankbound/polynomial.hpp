#pragma once

#include <map>
#include <string>
#include <utility>

#include "rankbound/word.hpp"

namespace rankbound {

// Real linear combination of words. Zero coefficients are never stored.
class Polynomial {
 public:
  using Terms = std::map<Word, double>;

  Polynomial() = default;
  Polynomial(double constant);  // NOLINT(google-explicit-constructor)
  Polynomial(const Word& w, double coeff = 1.0);

  static Polynomial variable(int i) { return Polynomial(Word{i}); }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  // -1 for the zero polynomial.
  int degree() const;
  double coefficient(const Word& w) const;

  Polynomial& add_term(const Word& w, double coeff);
  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial operator-() const { return *this * -1.0; }

  Polynomial involution() const;

  std::string str() const;

 private:
  Terms terms_;
};

}  // namespace rankbound
