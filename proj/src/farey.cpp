#include "cfld/farey.hpp"

#include <numeric>
#include <string>

#include "cfld/errors.hpp"

namespace cfld {
namespace {

const Rational kHalf(1, 2);

void require_unit(const Rational& x, const char* what) {
  if (x < 0 || x > 1) throw DomainError(std::string(what) + ": x must lie in [0,1], got " + to_string(x));
}

}  // namespace

Branch farey_branch(const Rational& x) { return x <= kHalf ? Branch::Left : Branch::Right; }

bool in_k1(const Rational& x) { return x > kHalf && x <= 1; }

Rational farey_map(const Rational& x) {
  require_unit(x, "farey_map");
  Rational out = farey_branch(x) == Branch::Left ? Rational(x / (1 - x)) : Rational(1 / x - 1);
  return out;
}

OrbitRecord farey_orbit(const Rational& x, std::size_t steps) {
  require_unit(x, "farey_orbit");
  OrbitRecord rec;
  rec.points.reserve(steps + 1);
  rec.branches.reserve(steps);
  rec.points.push_back(x);
  for (std::size_t i = 0; i < steps; ++i) {
    const Rational& cur = rec.points.back();
    rec.branches.push_back(farey_branch(cur));
    rec.points.push_back(farey_map(cur));
  }
  return rec;
}

Rational u0(const Rational& x) { return x / (1 + x); }
Rational u1(const Rational& x) { return 1 / (1 + x); }

Rational u0_pow(const Rational& x, std::uint64_t n) {
  if (x <= 0 || x > 1) throw DomainError("u0_pow: x must lie in (0,1], got " + to_string(x));
  Rational out = x / (1 + Rational(to_big(n)) * x);
  return out;
}

std::uint64_t entry_time(const Rational& x) {
  require_unit(x, "entry_time");
  Rational cur = x;
  for (std::uint64_t k = 0;; ++k) {
    if (in_k1(cur)) return k;
    if (cur == 0) throw UnresolvedOrbit("entry_time: orbit of " + to_string(x) + " absorbed at 0");
    cur = farey_map(cur);
  }
}

std::uint64_t return_time(const Rational& x) {
  if (!in_k1(x)) throw DomainError("return_time: x must lie in K1 = (1/2,1]");
  Rational cur = farey_map(x);
  for (std::uint64_t k = 1;; ++k) {
    if (in_k1(cur)) return k;
    if (cur == 0) throw UnresolvedOrbit("return_time: orbit of " + to_string(x) + " absorbed at 0");
    cur = farey_map(cur);
  }
}

EntryReturn entry_return(const Rational& x) {
  EntryReturn out;
  out.entry = entry_time(x);
  if (in_k1(x)) out.phi = return_time(x);
  return out;
}

bool induced_equals_gauss(const Rational& x) {
  if (x <= 0 || x >= 1) throw DomainError("induced_equals_gauss: x must lie in (0,1)");
  const std::uint64_t e = entry_time(x);
  Rational cur = x;
  for (std::uint64_t i = 0; i <= e; ++i) cur = farey_map(cur);
  return cur == gauss_map(x);
}

std::vector<std::uint64_t> visit_times(std::span<const Digit> word) {
  std::vector<std::uint64_t> out;
  out.reserve(word.size());
  std::uint64_t sum = 0;
  for (Digit d : word) {
    sum += d;
    out.push_back(sum - 1);
  }
  return out;
}

std::vector<std::uint64_t> return_times(std::span<const Digit> word) {
  std::vector<std::uint64_t> out;
  std::uint64_t last = 0;
  for (std::uint64_t t : visit_times(word)) {
    if (t == 0) continue;
    out.push_back(t - last);
    last = t;
  }
  return out;
}

namespace {

RenewalProfile profile_from_visits(std::span<const std::uint64_t> visits, std::uint64_t n) {
  RenewalProfile p;
  bool have_next = false;
  for (std::uint64_t t : visits) {
    if (t <= n) {
      p.in_a = true;
      p.z = t;
      if (t >= 1) ++p.count;
    } else {
      p.y = t;
      have_next = true;
      break;
    }
  }
  if (!have_next) {
    throw InsufficientDigits("renewal profile: no visit after time n = " + std::to_string(n));
  }
  p.v = p.y - p.z;
  return p;
}

}  // namespace

RenewalProfile renewal_profile_from_word(std::span<const Digit> word, std::uint64_t n) {
  return profile_from_visits(visit_times(word), n);
}

RenewalProfile renewal_profile_from_orbit(const Rational& x, std::uint64_t n) {
  require_unit(x, "renewal_profile_from_orbit");
  std::vector<std::uint64_t> visits;
  Rational cur = x;
  for (std::uint64_t t = 0;; ++t) {
    if (in_k1(cur)) {
      visits.push_back(t);
      if (t > n) break;
    }
    if (cur == 0) throw UnresolvedOrbit("renewal profile: orbit of " + to_string(x) + " absorbed at 0");
    cur = farey_map(cur);
  }
  return profile_from_visits(visits, n);
}

IdentityReport identity_check(std::span<const Digit> word, std::uint64_t n, std::uint64_t m,
                              std::uint64_t k) {
  if (!(1 <= k && k <= n && n <= m)) throw DomainError("identity_check: need 1 <= k <= n <= m");
  const std::uint64_t total = std::accumulate(word.begin(), word.end(), std::uint64_t{0});
  if (total <= m + 1) throw InsufficientDigits("identity_check: digit total must exceed m + 1");

  const auto at_n = renewal_profile_from_word(word, n);
  const auto at_m = renewal_profile_from_word(word, m);
  const auto before = renewal_profile_from_word(word, n - 1);
  const auto stop = stopping_profile(word, n);

  IdentityReport r;
  r.dynkin = ((at_n.z <= k) && (at_n.y > m)) == (at_m.z <= k);
  r.spent_sum = stop.s_theta == (before.in_a ? before.z + 1 : 0);
  r.next_sum = stop.s_theta_next == 1 + before.y;
  r.next_digit = stop.kappa_next == (before.in_a ? before.v : 1 + before.y);
  r.theta_count = stop.theta == before.count + (word[0] == 1 ? 1 : 0);

  const auto taus = return_times(word);
  std::uint64_t partial = 0;
  for (std::uint64_t i = 0; i < at_n.count && i < taus.size(); ++i) partial += taus[i];
  r.renewal_sum = at_n.z == partial;
  return r;
}

}  // namespace cfld
