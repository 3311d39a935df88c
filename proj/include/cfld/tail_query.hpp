#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "cfld/cf_core.hpp"
#include "cfld/rational.hpp"

namespace cfld {

// JOINT:       n - S_theta > n x   and  S_{theta+1} - n > n y
// DIGIT:       k_{theta+1} > n x
// RATIO_INCL:  k_{theta+1} > x S_{theta+1}
// RATIO_PREV:  k_{theta+1} > x S_theta  and  theta > 0
enum class EventKind { Joint, Digit, RatioIncl, RatioPrev };

std::string_view event_name(EventKind kind);
EventKind parse_event(std::string_view name);

struct TailQuery {
  EventKind kind = EventKind::Joint;
  std::uint64_t n = 1;
  Rational x{0};
  Rational y{0};  // JOINT only

  // Throws DomainError when the thresholds are inadmissible for `kind`:
  // JOINT x >= 0 (x >= 1 gives the empty event), y >= 0, x + y != 0; DIGIT x > 0; RATIO_INCL 0 < x < 1;
  // RATIO_PREV x > 0; n >= 1 always.
  void validate() const;
};

// Integer-only evaluation of a query's event on a stopping profile, for hot
// sampling loops. Thresholds must have numerators/denominators below 2^63.
class EventPredicate {
 public:
  explicit EventPredicate(const TailQuery& q);

  bool operator()(const StoppingProfile& p) const noexcept;
  std::uint64_t n() const noexcept { return n_; }

 private:
  EventKind kind_;
  std::uint64_t n_;
  std::uint64_t x_num_, x_den_;
  std::uint64_t y_num_, y_den_;
};

}  // namespace cfld
