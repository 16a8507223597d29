#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace rankbound {

// Hard cap on word length; moment tables of level t hold words of degree 2t.
inline constexpr int kMaxWordDegree = 16;

// A noncommutative word x_{i1} x_{i2} ... over symbols 1..n. The empty word is 1.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<int> letters);
  explicit Word(std::span<const int> letters);

  int degree() const { return size_; }
  bool empty() const { return size_ == 0; }
  int operator[](int i) const { return letters_[static_cast<std::size_t>(i)]; }
  // Largest symbol index appearing, 0 for the empty word.
  int max_letter() const;

  std::vector<int> letters() const;

  // Concatenation; throws DegreeError past kMaxWordDegree.
  Word operator*(const Word& rhs) const;

  // Graded lexicographic order: shorter words first, then letter by letter.
  friend std::strong_ordering operator<=>(const Word& a, const Word& b);
  friend bool operator==(const Word& a, const Word& b);

  std::size_t hash() const;

  // "1", "x1", "x1x2x1", ...
  std::string str() const;

  void push_back(int letter);

 private:
  std::array<std::uint8_t, kMaxWordDegree> letters_{};
  std::uint8_t size_ = 0;
};

struct WordHash {
  std::size_t operator()(const Word& w) const { return w.hash(); }
};

// Commutative monomial x^alpha over n symbols.
class CMonomial {
 public:
  CMonomial() = default;
  explicit CMonomial(std::vector<int> exponents);

  int nvars() const { return static_cast<int>(exponents_.size()); }
  int degree() const;
  const std::vector<int>& exponents() const { return exponents_; }

  CMonomial operator*(const CMonomial& rhs) const;
  friend bool operator==(const CMonomial&, const CMonomial&) = default;

  // The sorted word x_1^{a_1} x_2^{a_2} ..., used as the canonical key.
  Word to_word() const;

 private:
  std::vector<int> exponents_;
};

// Commutative image w^c of a word over n symbols.
CMonomial commutative_image(const Word& w, int n);

// Which identifications a functional is assumed to respect.
struct EquivalenceMode {
  bool symmetric = false;   // L(w) = L(w*)
  bool tracial = false;     // L(ww') = L(w'w)
  bool commutative = false; // all letter permutations

  static EquivalenceMode none() { return {}; }
  static EquivalenceMode symmetric_tracial() { return {true, true, false}; }
  static EquivalenceMode commutative_mode() { return {false, false, true}; }

  friend bool operator==(const EquivalenceMode&, const EquivalenceMode&) = default;
};

// w* : letters in reverse order.
Word involution(const Word& w);

// Lexicographic minimum of the orbit of w under the enabled identifications.
Word canonical_word(const Word& w, EquivalenceMode mode);

// Sorted, duplicate-free canonical representatives of all words of degree <= t.
std::vector<Word> enumerate_words(int n, int t, EquivalenceMode mode);

// All words (mode none) or sorted monomial words (commutative) of degree exactly d.
std::vector<Word> words_of_degree(int n, int d, bool commutative);

// l! / (a_1! ... a_n!) for m = x^a of degree l. Throws ArithmeticError on overflow.
std::uint64_t multinomial_dm(const CMonomial& m);

// n + t choose t, with overflow checking.
std::uint64_t binomial(int n, int k);

}  // namespace rankbound

template <>
struct std::hash<rankbound::Word> {
  std::size_t operator()(const rankbound::Word& w) const { return w.hash(); }
};
