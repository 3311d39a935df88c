#include "cfld/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "cfld/errors.hpp"

namespace cfld {

double h_digit(double x) {
  if (!(x > 0.0)) throw DomainError("H: need x > 0");
  return x < 1.0 ? 1.0 - std::log(x) : 1.0 / x;
}

double h_ratio(double x) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("H~: need 0 < x < 1");
  return (1.0 - x) / x * -std::log1p(-x) - std::log(x);
}

LimitConstant limit_constant(const TailQuery& q) {
  q.validate();
  LimitConstant c;
  c.kind = q.kind;
  c.x = q.x.get_d();
  c.y = q.y.get_d();
  switch (q.kind) {
    case EventKind::Joint:
      if (q.x >= 1) throw DomainError("limit_constant: joint needs x < 1");
      c.value = std::log((1.0 + c.y) / (c.x + c.y));
      break;
    case EventKind::Digit:
      c.value = h_digit(c.x);
      break;
    case EventKind::RatioIncl:
      c.value = h_ratio(c.x);
      break;
    case EventKind::RatioPrev: {
      // x/(1+x) computed exactly before conversion
      const Rational z = q.x / (1 + q.x);
      c.value = h_ratio(z.get_d());
      break;
    }
  }
  return c;
}

std::vector<NormalizedRow> normalized_series(std::span<const TailQuery> queries,
                                             std::span<const SeriesPoint> points) {
  if (queries.size() != points.size()) throw DomainError("normalized_series: missing estimate");
  std::vector<NormalizedRow> rows;
  rows.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (queries[i].n != points[i].n) throw DomainError("normalized_series: estimate n does not match query");
    const double c = limit_constant(queries[i]).value;
    const double scale = std::log(static_cast<double>(points[i].n)) / c;
    rows.push_back({points[i].n, points[i].p, scale * points[i].p, scale * points[i].ci_low,
                    scale * points[i].ci_high});
  }
  return rows;
}

double ks_uniform(std::vector<double> values) {
  if (values.empty()) throw DomainError("ks_uniform: empty sample");
  for (double& v : values) v = std::clamp(v, 0.0, 1.0);
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, hi - values[i], values[i] - lo});
  }
  return d;
}

double rv_constants(double exponent, RvSequence which) {
  if (which == RvSequence::A) {
    if (!(exponent >= 0.0 && exponent <= 1.0)) throw DomainError("rv_constants: alpha must lie in [0,1]");
    return 1.0 / (std::tgamma(1.0 + exponent) * std::tgamma(2.0 - exponent));
  }
  if (!(exponent >= 0.0 && exponent < 1.0)) throw DomainError("rv_constants: beta must lie in [0,1)");
  return std::tgamma(1.0 - exponent) * std::tgamma(1.0 + exponent);
}

}  // namespace cfld
