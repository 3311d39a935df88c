#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "cfld/rational.hpp"

namespace cfld {

using Digit = std::uint64_t;

// Finite word of continued-fraction digits k_1..k_l, every entry >= 1.
// The empty word stands for the whole unit interval.
class DigitWord {
 public:
  DigitWord() = default;
  DigitWord(std::initializer_list<Digit> digits);
  explicit DigitWord(std::vector<Digit> digits);

  std::size_t size() const noexcept { return digits_.size(); }
  bool empty() const noexcept { return digits_.empty(); }
  Digit operator[](std::size_t i) const { return digits_[i]; }
  std::span<const Digit> digits() const noexcept { return digits_; }
  auto begin() const noexcept { return digits_.begin(); }
  auto end() const noexcept { return digits_.end(); }

  void push_back(Digit d);
  DigitWord extended(Digit d) const;

  friend bool operator==(const DigitWord&, const DigitWord&) = default;

 private:
  std::vector<Digit> digits_;
};

// Convergent data (p_l, q_l, p_{l-1}, q_{l-1}) of a word of length l.
struct ContinuantFrame {
  BigInt p_cur{0};
  BigInt q_cur{1};
  BigInt p_prev{1};
  BigInt q_prev{0};

  // p_prev * q_cur - p_cur * q_prev, which is (-1)^l.
  BigInt determinant() const { return p_prev * q_cur - p_cur * q_prev; }
  Rational value() const { return Rational(p_cur, q_cur); }
};

// Closed cylinder of a word; the open interior is the set of x whose
// expansion starts with `word`.
struct CylinderInterval {
  Rational lower;
  Rational upper;
  DigitWord word;

  Rational measure() const { return upper - lower; }
};

struct StoppingProfile {
  std::uint64_t theta = 0;          // max{l : S_l <= n}
  std::uint64_t s_theta = 0;        // S_theta
  std::uint64_t s_theta_next = 0;   // S_{theta+1}
  std::uint64_t kappa_next = 0;     // k_{theta+1}

  friend bool operator==(const StoppingProfile&, const StoppingProfile&) = default;
};

struct KhinchinStats {
  double geometric_mean = 0.0;
  double trimmed_ratio = 0.0;  // (S_n - max digit) / (n log n)
};

// Digits of x in (0,1) by the rule k = floor(1/x), x <- 1/x - k, stopping when
// the remainder hits 0 or after max_len digits. A terminating expansion of
// length >= 2 therefore ends in a digit >= 2.
DigitWord cf_digits(const Rational& x, std::size_t max_len);

// Gauss map G(x) = 1/x - floor(1/x), exact. G(0) is defined as 0.
Rational gauss_map(const Rational& x);

ContinuantFrame continuant_frame(const DigitWord& word);

CylinderInterval cylinder(const DigitWord& word);

// Lebesgue measure of {x in cylinder(word) : next digit >= m},
// i.e. 1 / (q (m q + q')).
Rational child_tail_measure(const DigitWord& word, const BigInt& m);
Rational child_tail_measure(const DigitWord& word, std::uint64_t m);

// theta_n and the partial sums around it. Throws InsufficientDigits when the
// word's total is <= n.
StoppingProfile stopping_profile(std::span<const Digit> word, std::uint64_t n);
inline StoppingProfile stopping_profile(const DigitWord& word, std::uint64_t n) {
  return stopping_profile(word.digits(), n);
}

// Geometric mean (log space) and trimmed-sum ratio. Requires length >= 2.
KhinchinStats khinchin_stats(std::span<const Digit> word);
inline KhinchinStats khinchin_stats(const DigitWord& word) { return khinchin_stats(word.digits()); }

}  // namespace cfld
