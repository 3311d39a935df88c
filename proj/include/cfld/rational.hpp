#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace cfld {

using BigInt = mpz_class;
using Rational = mpq_class;

// Parses "p/q", "k" or a plain decimal such as "0.25" into an exact rational.
// Throws std::invalid_argument on malformed text or a zero denominator.
Rational parse_rational(std::string_view text);

// p/q in lowest terms. mpq_class(p, q) alone does not reduce.
Rational make_rational(const BigInt& num, const BigInt& den);

std::string to_string(const Rational& value);
std::string to_string(const BigInt& value);

BigInt floor(const Rational& value);

inline BigInt to_big(std::uint64_t v) {
  BigInt out;
  mpz_import(out.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return out;
}

inline BigInt to_big(unsigned __int128 v) {
  const std::uint64_t words[2] = {static_cast<std::uint64_t>(v >> 64),
                                  static_cast<std::uint64_t>(v)};
  BigInt out;
  mpz_import(out.get_mpz_t(), 2, 1, sizeof(std::uint64_t), 0, 0, words);
  return out;
}

// True when v fits in an unsigned 64-bit integer (and is nonnegative).
bool fits_u64(const BigInt& v);
std::uint64_t to_u64(const BigInt& v);

}  // namespace cfld
