#include "cfld/cf_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cfld/errors.hpp"

namespace cfld {

DigitWord::DigitWord(std::initializer_list<Digit> digits) : DigitWord(std::vector<Digit>(digits)) {}

DigitWord::DigitWord(std::vector<Digit> digits) : digits_(std::move(digits)) {
  if (std::find(digits_.begin(), digits_.end(), Digit{0}) != digits_.end()) {
    throw DomainError("continued-fraction digits must be >= 1");
  }
}

void DigitWord::push_back(Digit d) {
  if (d == 0) throw DomainError("continued-fraction digits must be >= 1");
  digits_.push_back(d);
}

DigitWord DigitWord::extended(Digit d) const {
  DigitWord out = *this;
  out.push_back(d);
  return out;
}

DigitWord cf_digits(const Rational& x, std::size_t max_len) {
  if (x <= 0 || x >= 1) throw DomainError("cf_digits: x must lie in (0,1), got " + to_string(x));
  // Euclid on numerator/denominator: 1/x = den/num.
  BigInt num = x.get_num();
  BigInt den = x.get_den();
  DigitWord word;
  BigInt quotient;
  BigInt remainder;
  while (num != 0 && word.size() < max_len) {
    mpz_fdiv_qr(quotient.get_mpz_t(), remainder.get_mpz_t(), den.get_mpz_t(), num.get_mpz_t());
    if (!fits_u64(quotient)) throw DomainError("cf_digits: digit exceeds 64-bit range");
    word.push_back(to_u64(quotient));
    den = num;
    num = remainder;
  }
  return word;
}

Rational gauss_map(const Rational& x) {
  if (x == 0) return Rational(0);
  Rational inv = 1 / x;
  Rational out = inv - Rational(floor(inv));
  return out;
}

ContinuantFrame continuant_frame(const DigitWord& word) {
  ContinuantFrame f;
  for (Digit d : word) {
    BigInt k = to_big(d);
    BigInt p_next = k * f.p_cur + f.p_prev;
    BigInt q_next = k * f.q_cur + f.q_prev;
    f.p_prev = std::move(f.p_cur);
    f.q_prev = std::move(f.q_cur);
    f.p_cur = std::move(p_next);
    f.q_cur = std::move(q_next);
  }
  return f;
}

CylinderInterval cylinder(const DigitWord& word) {
  const auto f = continuant_frame(word);
  Rational a(f.p_cur, f.q_cur);
  Rational b(BigInt(f.p_cur + f.p_prev), BigInt(f.q_cur + f.q_prev));
  a.canonicalize();
  b.canonicalize();
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b), word};
}

Rational child_tail_measure(const DigitWord& word, const BigInt& m) {
  if (m < 1) throw DomainError("child_tail_measure: m must be >= 1");
  const auto f = continuant_frame(word);
  Rational out(BigInt(1), BigInt(f.q_cur * (m * f.q_cur + f.q_prev)));
  out.canonicalize();
  return out;
}

Rational child_tail_measure(const DigitWord& word, std::uint64_t m) {
  return child_tail_measure(word, to_big(m));
}

StoppingProfile stopping_profile(std::span<const Digit> word, std::uint64_t n) {
  StoppingProfile p;
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    const std::uint64_t next = sum + word[i];
    if (next > n) {
      p.theta = i;
      p.s_theta = sum;
      p.s_theta_next = next;
      p.kappa_next = word[i];
      return p;
    }
    sum = next;
  }
  throw InsufficientDigits("stopping_profile: digit sum " + std::to_string(sum) +
                           " does not exceed n = " + std::to_string(n));
}

KhinchinStats khinchin_stats(std::span<const Digit> word) {
  if (word.size() < 2) throw DomainError("khinchin_stats: need at least two digits");
  double log_sum = 0.0;
  unsigned __int128 sum = 0;
  Digit largest = 0;
  for (Digit d : word) {
    log_sum += std::log(static_cast<double>(d));
    sum += d;
    largest = std::max(largest, d);
  }
  const double n = static_cast<double>(word.size());
  const auto trimmed = static_cast<double>(sum - largest);
  return {std::exp(log_sum / n), trimmed / (n * std::log(n))};
}

}  // namespace cfld
