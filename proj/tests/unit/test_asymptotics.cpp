#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cfld/asymptotics.hpp"
#include "cfld/errors.hpp"

using namespace cfld;

namespace {

double c(EventKind k, Rational x, Rational y = 0) { return limit_constant(TailQuery{k, 1, x, y}).value; }

}  // namespace

TEST_CASE("limit constants") {
  CHECK(c(EventKind::Joint, make_rational(1, 4), make_rational(1, 4)) == doctest::Approx(std::log(2.5)));
  CHECK(c(EventKind::Joint, make_rational(1, 3), Rational(0)) == doctest::Approx(std::log(3.0)));
  CHECK(c(EventKind::Digit, Rational(1)) == doctest::Approx(1.0));
  CHECK(c(EventKind::Digit, Rational(2)) == doctest::Approx(0.5));
  CHECK(c(EventKind::RatioIncl, make_rational(1, 2)) == doctest::Approx(2 * std::log(2.0)));
  CHECK(c(EventKind::RatioPrev, Rational(1)) == doctest::Approx(2 * std::log(2.0)));
  CHECK_THROWS_AS(c(EventKind::Joint, Rational(1), Rational(1)), DomainError);
  CHECK_THROWS_AS(c(EventKind::RatioIncl, Rational(1)), DomainError);
  const auto lc = limit_constant(TailQuery{EventKind::Joint, 3, make_rational(1, 4), make_rational(1, 2)});
  CHECK(lc.kind == EventKind::Joint);
  CHECK(lc.x == 0.25);
  CHECK(lc.y == 0.5);
}

TEST_CASE("shape of H") {
  // continuity and matching one-sided derivatives at 1
  CHECK(h_digit(1.0 - 1e-12) == doctest::Approx(h_digit(1.0 + 1e-12)));
  const double e = 1e-6;
  CHECK((h_digit(1.0) - h_digit(1.0 - e)) / e == doctest::Approx(-1.0).epsilon(1e-5));
  CHECK((h_digit(1.0 + e) - h_digit(1.0)) / e == doctest::Approx(-1.0).epsilon(1e-5));
  double prev = h_digit(0.01);
  for (int i = 2; i <= 500; ++i) {
    const double x = 0.01 * i;
    const double v = h_digit(x);
    CHECK(v < prev);
    prev = v;
    CHECK(h_digit(x - 0.01) - 2 * v + h_digit(x + 0.01) >= -1e-12);
  }
  for (int i = 1; i < 100; ++i) {
    const double x = i / 100.0;
    CHECK(c(EventKind::Joint, make_rational(i, 100)) == doctest::Approx(h_digit(x) - 1.0));
  }
}

TEST_CASE("shape of H tilde") {
  double prev = h_ratio(1e-3);
  for (int i = 2; i < 1000; ++i) {
    const double v = h_ratio(i * 1e-3);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(h_ratio(1e-9) - std::log(1e9) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(h_ratio(1 - 1e-9) < 1e-6);
  prev = c(EventKind::RatioPrev, make_rational(1, 100));
  for (int i = 2; i <= 400; ++i) {
    const double v = c(EventKind::RatioPrev, make_rational(i, 100));
    CHECK(v < prev);
    prev = v;
  }
  CHECK(c(EventKind::RatioPrev, Rational(1000000)) < 1e-4);
}

TEST_CASE("normalized series") {
  const TailQuery q{EventKind::Joint, 20, make_rational(1, 4), make_rational(1, 4)};
  const SeriesPoint p{20, 0.333127933360708, 0.33, 0.34};
  const auto rows = normalized_series(std::span(&q, 1), std::span(&p, 1));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].normalized == doctest::Approx(std::log(20.0) * p.p / std::log(2.5)));
  CHECK(rows[0].normalized_low < rows[0].normalized);
  CHECK(rows[0].normalized < rows[0].normalized_high);
  CHECK(std::isfinite(rows[0].normalized));

  const TailQuery d{EventKind::Digit, 100, Rational(3), Rational(0)};
  const SeriesPoint zero{100, 0.0, 0.0, 0.0};
  CHECK(normalized_series(std::span(&d, 1), std::span(&zero, 1))[0].normalized == 0.0);

  std::vector<TailQuery> two{q, q};
  CHECK_THROWS_AS(normalized_series(two, std::span(&p, 1)), DomainError);
  const SeriesPoint wrong_n{21, 0.3, 0.2, 0.4};
  CHECK_THROWS_AS(normalized_series(std::span(&q, 1), std::span(&wrong_n, 1)), DomainError);
}

TEST_CASE("uniform KS distance") {
  for (int N : {1, 10, 1000}) {
    std::vector<double> v;
    for (int i = 1; i <= N; ++i) v.push_back((i - 0.5) / N);
    CHECK(ks_uniform(v) == doctest::Approx(0.5 / N));
  }
  CHECK(ks_uniform(std::vector<double>(50, 0.0)) == doctest::Approx(1.0));
  CHECK(ks_uniform({-3.0, 7.0}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(ks_uniform({}), DomainError);
}

TEST_CASE("regular variation constants") {
  CHECK(rv_constants(1.0, RvSequence::A) == doctest::Approx(1.0));
  CHECK(rv_constants(0.0, RvSequence::A) == doctest::Approx(1.0));
  CHECK(rv_constants(0.0, RvSequence::B) == doctest::Approx(1.0));
  CHECK(rv_constants(0.5, RvSequence::A) == doctest::Approx(4.0 / std::numbers::pi));
  CHECK(rv_constants(0.5, RvSequence::B) == doctest::Approx(std::numbers::pi / 2));
  CHECK_THROWS_AS(rv_constants(1.0, RvSequence::B), DomainError);
  CHECK_THROWS_AS(rv_constants(-0.1, RvSequence::A), DomainError);
  CHECK_THROWS_AS(rv_constants(1.1, RvSequence::A), DomainError);
}
