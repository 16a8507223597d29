#include "rankbound/polynomial.hpp"

#include <algorithm>
#include <cstdio>

namespace rankbound {

Polynomial::Polynomial(double constant) {
  if (constant != 0.0) {
    terms_.emplace(Word{}, constant);
  }
}

Polynomial::Polynomial(const Word& w, double coeff) {
  if (coeff != 0.0) {
    terms_.emplace(w, coeff);
  }
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [w, c] : terms_) {
    d = std::max(d, w.degree());
  }
  return d;
}

double Polynomial::coefficient(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? 0.0 : it->second;
}

Polynomial& Polynomial::add_term(const Word& w, double coeff) {
  if (coeff == 0.0) {
    return *this;
  }
  auto [it, inserted] = terms_.emplace(w, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) {
      terms_.erase(it);
    }
  }
  return *this;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  for (const auto& [w, c] : rhs.terms_) {
    add_term(w, c);
  }
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  for (const auto& [w, c] : rhs.terms_) {
    add_term(w, -c);
  }
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [w, c] : terms_) {
    c *= s;
  }
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [wa, ca] : a.terms_) {
    for (const auto& [wb, cb] : b.terms_) {
      out.add_term(wa * wb, ca * cb);
    }
  }
  return out;
}

Polynomial Polynomial::involution() const {
  Polynomial out;
  for (const auto& [w, c] : terms_) {
    out.add_term(rankbound::involution(w), c);
  }
  return out;
}

std::string Polynomial::str() const {
  if (terms_.empty()) {
    return "0";
  }
  std::string out;
  bool first = true;
  for (const auto& [w, c] : terms_) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%.6g", (!first && c >= 0) ? "+" : "", c);
    out += buf;
    if (!w.empty()) {
      out += "*" + w.str();
    }
    first = false;
  }
  return out;
}

}  // namespace rankbound
