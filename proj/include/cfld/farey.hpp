#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cfld/cf_core.hpp"
#include "cfld/rational.hpp"

namespace cfld {

// Farey map T on [0,1]: T0(x) = x/(1-x) on [0,1/2], T1(x) = 1/x - 1 on (1/2,1].
// x = 1/2 goes to the left branch. K1 = (1/2, 1] is the reference set.
enum class Branch : std::uint8_t { Left = 0, Right = 1 };

Branch farey_branch(const Rational& x);
Rational farey_map(const Rational& x);
bool in_k1(const Rational& x);

struct OrbitRecord {
  std::vector<Rational> points;   // x, T x, ..., T^steps x
  std::vector<Branch> branches;   // branch used at each of the `steps` steps
};

OrbitRecord farey_orbit(const Rational& x, std::size_t steps);

// Inverse branches u0(x) = x/(1+x), u1(x) = 1/(1+x).
Rational u0(const Rational& x);
Rational u1(const Rational& x);
// n-fold u0 in closed form, x / (1 + n x). Requires 0 < x <= 1.
Rational u0_pow(const Rational& x, std::uint64_t n);

// e(x) = min{k >= 0 : T^k x in K1}. Throws UnresolvedOrbit if the orbit
// reaches 0 first.
std::uint64_t entry_time(const Rational& x);
// phi(x) = min{k >= 1 : T^k x in K1} for x in K1.
std::uint64_t return_time(const Rational& x);

struct EntryReturn {
  std::uint64_t entry = 0;
  std::optional<std::uint64_t> phi;  // present iff x in K1
};
EntryReturn entry_return(const Rational& x);

// True iff T^{e(x)+1}(x) equals the Gauss map G(x).
bool induced_equals_gauss(const Rational& x);

struct RenewalProfile {
  std::uint64_t z = 0;      // last visit to K1 at a time <= n, 0 if none
  std::uint64_t y = 0;      // first visit at a time > n
  std::uint64_t v = 0;      // y - z
  std::uint64_t count = 0;  // N_n: visits at times 1..n
  bool in_a = false;        // some visit at a time in [0, n]

  friend bool operator==(const RenewalProfile&, const RenewalProfile&) = default;
};

// Visit times to K1 read off a digit word: {S_l - 1 : l >= 1}.
std::vector<std::uint64_t> visit_times(std::span<const Digit> word);
// tau_1, tau_2, ...: gaps between successive visits at times >= 1.
std::vector<std::uint64_t> return_times(std::span<const Digit> word);

// Needs the digit total to exceed n + 1; throws InsufficientDigits otherwise.
RenewalProfile renewal_profile_from_word(std::span<const Digit> word, std::uint64_t n);
inline RenewalProfile renewal_profile_from_word(const DigitWord& word, std::uint64_t n) {
  return renewal_profile_from_word(word.digits(), n);
}

// Same quantities by iterating the Farey map on x. Cross-check only.
RenewalProfile renewal_profile_from_orbit(const Rational& x, std::uint64_t n);

struct IdentityReport {
  bool dynkin = false;          // {Z_n <= k, Y_n > m} == {Z_m <= k}
  bool spent_sum = false;       // S_{theta_n} = Z_{n-1} + 1 on A_{n-1}, else 0
  bool next_sum = false;        // S_{theta_n + 1} = 1 + Y_{n-1}
  bool next_digit = false;      // k_{theta_n + 1} = V_{n-1} on A_{n-1}, else 1 + Y_{n-1}
  bool theta_count = false;     // theta_n = N_{n-1} + 1{x in K1}
  bool renewal_sum = false;     // Z_n = tau_1 + ... + tau_{N_n}

  bool all() const {
    return dynkin && spent_sum && next_sum && next_digit && theta_count && renewal_sum;
  }
};

// Requires 1 <= k <= n <= m and a digit total exceeding m + 1.
IdentityReport identity_check(std::span<const Digit> word, std::uint64_t n, std::uint64_t m,
                              std::uint64_t k);
inline IdentityReport identity_check(const DigitWord& word, std::uint64_t n, std::uint64_t m,
                                     std::uint64_t k) {
  return identity_check(word.digits(), n, m, k);
}

}  // namespace cfld
