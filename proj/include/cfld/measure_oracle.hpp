#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cfld/rational.hpp"
#include "cfld/tail_query.hpp"

namespace cfld {

struct ExactTail {
  Rational probability;
  std::uint64_t prefixes_enumerated = 0;
};

// Prefix enumeration visits ~2^n words; beyond this n the oracle refuses.
inline constexpr std::uint64_t kDefaultEnumerationCap = 26;

// For each s = S_theta in [0, n], the smallest admissible k_{theta+1} under
// the query's event, or nullopt when no continuation of a prefix with that
// sum belongs to the event. Always >= n - s + 1.
std::vector<std::optional<BigInt>> next_digit_thresholds(const TailQuery& q);

// Exact Lebesgue measure of the union over prefixes w with S(w) = s <= n of
// {x in cylinder(w) : next digit >= min_next[s]}. `min_next` has n + 1 entries.
ExactTail exact_tail_by_threshold(std::uint64_t n, std::span<const std::optional<BigInt>> min_next,
                                  std::uint64_t cap = kDefaultEnumerationCap);

// Exact lambda-probability of the query's event at its n.
ExactTail exact_event_tail(const TailQuery& q, std::uint64_t cap = kDefaultEnumerationCap);

// W_n(K1) = mu(union_{k<=n} T^{-k} K1) = log(n + 2).
double wandering_rate(std::uint64_t n);

// Left endpoint of K1 ∩ {phi > n}, which is the interval [(n+1)/(n+2), 1].
Rational return_tail_lower(std::uint64_t n);

// mu(K1 ∩ {phi > n}) = log((n+2)/(n+1)).
double return_tail(std::uint64_t n);

}  // namespace cfld
