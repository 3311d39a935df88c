#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cfld/tail_query.hpp"

namespace cfld {

// H(x) = 1 - log x on (0,1), 1/x on [1, inf).
double h_digit(double x);
// H~(x) = (1-x)/x log(1/(1-x)) + log(1/x) on (0,1).
double h_ratio(double x);

struct LimitConstant {
  double value = 0.0;
  EventKind kind = EventKind::Joint;
  double x = 0.0;
  double y = 0.0;
};

// C such that P(event_n) ~ C / log n:
// JOINT log((1+y)/(x+y)), DIGIT H(x), RATIO_INCL H~(x), RATIO_PREV H~(x/(1+x)).
LimitConstant limit_constant(const TailQuery& q);

struct SeriesPoint {
  std::uint64_t n = 0;
  double p = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct NormalizedRow {
  std::uint64_t n = 0;
  double p = 0.0;
  double normalized = 0.0;  // log(n) p / C
  double normalized_low = 0.0;
  double normalized_high = 0.0;
};

// `queries` and `points` are parallel: one query (kind, thresholds, n) per
// estimate. Throws DomainError on a length mismatch or mismatched n.
std::vector<NormalizedRow> normalized_series(std::span<const TailQuery> queries,
                                             std::span<const SeriesPoint> points);

// Kolmogorov-Smirnov distance of the empirical law of `values` (clamped to
// [0,1]) to the uniform law on [0,1].
double ks_uniform(std::vector<double> values);

enum class RvSequence { A, B };

// A: 1 / (Gamma(1+alpha) Gamma(2-alpha)), alpha in [0,1]  (a_n W_n ~ n * this)
// B: Gamma(1-beta) Gamma(1+beta), beta in [0,1)          (b_n ~ W_n * this)
double rv_constants(double exponent, RvSequence which);

}  // namespace cfld
