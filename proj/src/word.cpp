#include "rankbound/word.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "rankbound/errors.hpp"

namespace rankbound {

Word::Word(std::initializer_list<int> letters) : Word(std::span<const int>(letters.begin(), letters.size())) {}

Word::Word(std::span<const int> letters) {
  for (int letter : letters) {
    push_back(letter);
  }
}

void Word::push_back(int letter) {
  if (size_ >= kMaxWordDegree) {
    throw DegreeError("word degree exceeds cap of " + std::to_string(kMaxWordDegree));
  }
  if (letter < 1 || letter > 255) {
    throw DegreeError("symbol index out of range: " + std::to_string(letter));
  }
  letters_[size_++] = static_cast<std::uint8_t>(letter);
}

int Word::max_letter() const {
  int best = 0;
  for (int i = 0; i < size_; ++i) {
    best = std::max(best, static_cast<int>(letters_[i]));
  }
  return best;
}

std::vector<int> Word::letters() const { return {letters_.begin(), letters_.begin() + size_}; }

Word Word::operator*(const Word& rhs) const {
  if (size_ + rhs.size_ > kMaxWordDegree) {
    throw DegreeError("product degree " + std::to_string(size_ + rhs.size_) + " exceeds cap");
  }
  Word out = *this;
  std::copy(rhs.letters_.begin(), rhs.letters_.begin() + rhs.size_, out.letters_.begin() + size_);
  out.size_ = static_cast<std::uint8_t>(size_ + rhs.size_);
  return out;
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
  if (a.size_ != b.size_) {
    return a.size_ <=> b.size_;
  }
  for (int i = 0; i < a.size_; ++i) {
    if (a.letters_[i] != b.letters_[i]) {
      return a.letters_[i] <=> b.letters_[i];
    }
  }
  return std::strong_ordering::equal;
}

bool operator==(const Word& a, const Word& b) {
  return a.size_ == b.size_ && std::equal(a.letters_.begin(), a.letters_.begin() + a.size_, b.letters_.begin());
}

std::size_t Word::hash() const {
  // FNV-1a over the used letters.
  std::uint64_t h = 1469598103934665603ULL ^ size_;
  for (int i = 0; i < size_; ++i) {
    h ^= letters_[i];
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

std::string Word::str() const {
  if (size_ == 0) {
    return "1";
  }
  std::string out;
  for (int i = 0; i < size_; ++i) {
    out += "x" + std::to_string(letters_[i]);
  }
  return out;
}

CMonomial::CMonomial(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) {
      throw DegreeError("negative exponent in monomial");
    }
  }
}

int CMonomial::degree() const {
  int d = 0;
  for (int e : exponents_) d += e;
  return d;
}

CMonomial CMonomial::operator*(const CMonomial& rhs) const {
  std::vector<int> e(std::max(exponents_.size(), rhs.exponents_.size()), 0);
  for (std::size_t i = 0; i < exponents_.size(); ++i) e[i] += exponents_[i];
  for (std::size_t i = 0; i < rhs.exponents_.size(); ++i) e[i] += rhs.exponents_[i];
  return CMonomial(std::move(e));
}

Word CMonomial::to_word() const {
  Word w;
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    for (int k = 0; k < exponents_[i]; ++k) {
      w.push_back(static_cast<int>(i) + 1);
    }
  }
  return w;
}

CMonomial commutative_image(const Word& w, int n) {
  if (w.max_letter() > n) {
    throw DegreeError("word uses symbol beyond n=" + std::to_string(n));
  }
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < w.degree(); ++i) {
    ++e[static_cast<std::size_t>(w[i] - 1)];
  }
  return CMonomial(std::move(e));
}

Word involution(const Word& w) {
  std::vector<int> letters = w.letters();
  std::reverse(letters.begin(), letters.end());
  return Word(std::span<const int>(letters));
}

namespace {

Word rotate(const std::vector<int>& letters, std::size_t shift) {
  std::vector<int> r(letters.size());
  for (std::size_t i = 0; i < letters.size(); ++i) {
    r[i] = letters[(i + shift) % letters.size()];
  }
  return Word(std::span<const int>(r));
}

}  // namespace

Word canonical_word(const Word& w, EquivalenceMode mode) {
  if (w.degree() <= 1) {
    return w;
  }
  if (mode.commutative) {
    std::vector<int> letters = w.letters();
    std::sort(letters.begin(), letters.end());
    return Word(std::span<const int>(letters));
  }
  std::vector<std::vector<int>> seeds{w.letters()};
  if (mode.symmetric) {
    seeds.push_back(involution(w).letters());
  }
  Word best = w;
  for (const auto& seed : seeds) {
    const std::size_t shifts = mode.tracial ? seed.size() : 1;
    for (std::size_t s = 0; s < shifts; ++s) {
      Word candidate = rotate(seed, s);
      if (candidate < best) {
        best = candidate;
      }
    }
  }
  return best;
}

std::vector<Word> words_of_degree(int n, int d, bool commutative) {
  std::vector<Word> out;
  std::vector<int> letters(static_cast<std::size_t>(d), 1);
  if (d == 0) {
    out.emplace_back();
    return out;
  }
  while (true) {
    out.emplace_back(std::span<const int>(letters));
    // Odometer increment; in commutative mode keep letters nondecreasing.
    int pos = d - 1;
    while (pos >= 0 && letters[static_cast<std::size_t>(pos)] == n) {
      --pos;
    }
    if (pos < 0) {
      break;
    }
    ++letters[static_cast<std::size_t>(pos)];
    for (int k = pos + 1; k < d; ++k) {
      letters[static_cast<std::size_t>(k)] = commutative ? letters[static_cast<std::size_t>(pos)] : 1;
    }
  }
  return out;
}

std::vector<Word> enumerate_words(int n, int t, EquivalenceMode mode) {
  if (n < 1 || t < 0) {
    throw DegreeError("enumerate_words needs n >= 1 and t >= 0");
  }
  if (t > kMaxWordDegree) {
    throw DegreeError("degree " + std::to_string(t) + " exceeds cap");
  }
  std::vector<Word> out;
  for (int d = 0; d <= t; ++d) {
    std::vector<Word> layer = words_of_degree(n, d, mode.commutative);
    if (!mode.commutative && (mode.symmetric || mode.tracial)) {
      std::set<Word> reps;
      for (const Word& w : layer) {
        reps.insert(canonical_word(w, mode));
      }
      layer.assign(reps.begin(), reps.end());
    }
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw ArithmeticError("integer overflow in combinatorial coefficient");
  }
  return r;
}

}  // namespace

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) {
    return 0;
  }
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    // r * (n - k + i) is divisible by i at every step.
    const unsigned __int128 next = static_cast<unsigned __int128>(r) * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (next > std::numeric_limits<std::uint64_t>::max()) {
      throw ArithmeticError("integer overflow in binomial coefficient");
    }
    r = static_cast<std::uint64_t>(next);
  }
  return r;
}

std::uint64_t multinomial_dm(const CMonomial& m) {
  // Product of binomials: C(a1, a1) C(a1+a2, a2) ...
  std::uint64_t r = 1;
  int running = 0;
  for (int e : m.exponents()) {
    running += e;
    r = checked_mul(r, binomial(running, e));
  }
  return r;
}

}  // namespace rankbound
