#include "cfld/tail_query.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "cfld/errors.hpp"

namespace cfld {

std::string_view event_name(EventKind kind) {
  switch (kind) {
    case EventKind::Joint: return "joint";
    case EventKind::Digit: return "digit";
    case EventKind::RatioIncl: return "ratio_incl";
    case EventKind::RatioPrev: return "ratio_prev";
  }
  return "unknown";
}

EventKind parse_event(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  std::replace(s.begin(), s.end(), '-', '_');
  if (s == "joint") return EventKind::Joint;
  if (s == "digit") return EventKind::Digit;
  if (s == "ratio_incl" || s == "incl") return EventKind::RatioIncl;
  if (s == "ratio_prev" || s == "prev") return EventKind::RatioPrev;
  throw DomainError("unknown event kind: " + std::string(name));
}

void TailQuery::validate() const {
  if (n < 1) throw DomainError("query: n must be >= 1");
  switch (kind) {
    case EventKind::Joint:
      // x >= 1 is accepted: the event is then empty
      if (x < 0) throw DomainError("joint: need x >= 0");
      if (y < 0) throw DomainError("joint: need y >= 0");
      if (x + y == 0) throw DomainError("joint: need x + y != 0");
      break;
    case EventKind::Digit:
      if (x <= 0) throw DomainError("digit: need x > 0");
      break;
    case EventKind::RatioIncl:
      if (x <= 0 || x >= 1) throw DomainError("ratio_incl: need 0 < x < 1");
      break;
    case EventKind::RatioPrev:
      if (x <= 0) throw DomainError("ratio_prev: need x > 0");
      break;
  }
}

namespace {

std::uint64_t small_part(const BigInt& v) {
  if (sgn(v) < 0 || mpz_sizeinbase(v.get_mpz_t(), 2) > 63) {
    throw DomainError("threshold numerator/denominator must be below 2^63 for sampling");
  }
  return to_u64(v);
}

}  // namespace

EventPredicate::EventPredicate(const TailQuery& q)
    : kind_(q.kind),
      n_(q.n),
      x_num_(small_part(q.x.get_num())),
      x_den_(small_part(q.x.get_den())),
      y_num_(small_part(q.y.get_num())),
      y_den_(small_part(q.y.get_den())) {}

bool EventPredicate::operator()(const StoppingProfile& p) const noexcept {
  using u128 = unsigned __int128;
  const u128 n = n_;
  switch (kind_) {
    case EventKind::Joint:
      return u128(n_ - p.s_theta) * x_den_ > n * x_num_ &&
             u128(p.s_theta_next - n_) * y_den_ > n * y_num_;
    case EventKind::Digit:
      return u128(p.kappa_next) * x_den_ > n * x_num_;
    case EventKind::RatioIncl:
      return u128(p.kappa_next) * x_den_ > u128(x_num_) * p.s_theta_next;
    case EventKind::RatioPrev:
      return p.theta > 0 && u128(p.kappa_next) * x_den_ > u128(x_num_) * p.s_theta;
  }
  return false;
}

}  // namespace cfld
