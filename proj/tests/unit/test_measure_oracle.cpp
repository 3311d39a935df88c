#include <doctest.h>

#include <cmath>

#include "cfld/errors.hpp"
#include "cfld/farey.hpp"
#include "cfld/measure_oracle.hpp"
#include "oracle.hpp"

using namespace cfld;

namespace {

TailQuery query(EventKind kind, std::uint64_t n, Rational x, Rational y = 0) {
  return TailQuery{kind, n, std::move(x), std::move(y)};
}

Rational exact(EventKind kind, std::uint64_t n, Rational x, Rational y = 0) {
  return exact_event_tail(query(kind, n, std::move(x), std::move(y))).probability;
}

Rational from_oracle(const oracle::Q& q) { return Rational(oracle::str(q)); }

}  // namespace

TEST_CASE("brute-force oracle reproduces the small fixtures") {
  using oracle::rat;
  CHECK(oracle::event_probability(2, oracle::joint(2, rat(1, 4), rat(1, 4)), 20) == rat(2, 3));
  CHECK(oracle::event_probability(2, oracle::digit(2, 1), 20) == rat(61, 84));
  CHECK(oracle::event_probability(1, oracle::ratio_incl(rat(1, 2)), 20) == rat(5, 6));
  CHECK(oracle::event_probability(2, oracle::ratio_prev(1), 20) == rat(10, 21));
}

TEST_CASE("exact fixtures") {
  CHECK(exact(EventKind::Joint, 2, make_rational(1, 4), make_rational(1, 4)) == make_rational(2, 3));
  CHECK(exact(EventKind::Digit, 2, Rational(1)) == make_rational(61, 84));
  CHECK(exact(EventKind::RatioIncl, 1, make_rational(1, 2)) == make_rational(5, 6));
  CHECK(exact(EventKind::RatioPrev, 2, Rational(1)) == make_rational(10, 21));
}

TEST_CASE("joint with x >= 1 is empty") {
  for (std::uint64_t n : {1u, 5u, 12u}) {
    CHECK(exact(EventKind::Joint, n, Rational(1), Rational(0)) == 0);
    CHECK(exact(EventKind::Joint, n, make_rational(3, 2), make_rational(1, 4)) == 0);
  }
}

TEST_CASE("exact tails agree with the brute-force oracle") {
  using oracle::rat;
  for (std::uint64_t n = 1; n <= 11; ++n) {
    CAPTURE(n);
    const std::uint64_t kmax = 4 * n + 8;
    CHECK(exact(EventKind::Joint, n, make_rational(1, 4), make_rational(1, 4)) ==
          from_oracle(oracle::event_probability(n, oracle::joint(n, rat(1, 4), rat(1, 4)), kmax)));
    CHECK(exact(EventKind::Joint, n, Rational(0), make_rational(2, 3)) ==
          from_oracle(oracle::event_probability(n, oracle::joint(n, 0, rat(2, 3)), kmax)));
    CHECK(exact(EventKind::Digit, n, make_rational(1, 3)) ==
          from_oracle(oracle::event_probability(n, oracle::digit(n, rat(1, 3)), kmax)));
    CHECK(exact(EventKind::Digit, n, make_rational(5, 2)) ==
          from_oracle(oracle::event_probability(n, oracle::digit(n, rat(5, 2)), kmax)));
    CHECK(exact(EventKind::RatioIncl, n, make_rational(2, 3)) ==
          from_oracle(oracle::event_probability(n, oracle::ratio_incl(rat(2, 3)), kmax)));
    CHECK(exact(EventKind::RatioPrev, n, make_rational(3, 4)) ==
          from_oracle(oracle::event_probability(n, oracle::ratio_prev(rat(3, 4)), kmax)));
  }
}

TEST_CASE("joint with y = 0 matches the spent-fraction tail") {
  using oracle::rat;
  for (std::uint64_t n = 1; n <= 14; ++n) {
    for (auto [p, q] : {std::pair{1, 4}, {1, 2}, {2, 3}, {1, 10}}) {
      CAPTURE(n);
      CHECK(exact(EventKind::Joint, n, make_rational(p, q), Rational(0)) ==
            from_oracle(oracle::spent_fraction_tail(n, rat(p, q))));
    }
  }
}

TEST_CASE("enumeration is complete") {
  for (std::uint64_t n = 1; n <= 16; ++n) {
    std::vector<std::optional<BigInt>> all(n + 1);
    for (std::uint64_t s = 0; s <= n; ++s) all[s] = BigInt(static_cast<unsigned long>(n - s + 1));
    const auto t = exact_tail_by_threshold(n, all);
    CHECK(t.probability == 1);
    CHECK(t.prefixes_enumerated == (std::uint64_t{1} << n));
  }
}

TEST_CASE("monotone in the thresholds") {
  const std::uint64_t n = 12;
  Rational prev = 2;
  for (int i = 1; i <= 12; ++i) {
    const Rational p = exact(EventKind::Digit, n, make_rational(i, 4));
    CHECK(p <= prev);
    prev = p;
  }
  prev = 2;
  for (int i = 0; i <= 8; ++i) {
    const Rational p = exact(EventKind::Joint, n, make_rational(1, 5), make_rational(i, 4));
    CHECK(p <= prev);
    prev = p;
  }
  prev = 2;
  for (int i = 1; i <= 9; ++i) {
    const Rational p = exact(EventKind::RatioIncl, n, make_rational(i, 10));
    CHECK(p <= prev);
    prev = p;
  }
}

TEST_CASE("thresholds") {
  const auto t = next_digit_thresholds(query(EventKind::Digit, 2, Rational(1)));
  REQUIRE(t.size() == 3);
  CHECK(*t[0] == 3);
  CHECK(*t[1] == 3);
  CHECK(*t[2] == 3);
  const auto p = next_digit_thresholds(query(EventKind::RatioPrev, 4, Rational(1)));
  CHECK_FALSE(p[0].has_value());
  for (std::uint64_t s = 1; s <= 4; ++s) CHECK(*p[s] >= 4 - s + 1);
}

TEST_CASE("refusal and validation") {
  CHECK_THROWS_AS(exact(EventKind::Joint, 27, make_rational(1, 4), make_rational(1, 4)), Refused);
  CHECK_THROWS_AS(exact_event_tail(query(EventKind::Joint, 30, make_rational(1, 4), make_rational(1, 4)), 29), Refused);
  CHECK_THROWS_AS(exact(EventKind::Joint, 3, Rational(0), Rational(0)), DomainError);
  CHECK_THROWS_AS(exact(EventKind::Digit, 3, Rational(0)), DomainError);
  CHECK_THROWS_AS(exact(EventKind::RatioIncl, 3, Rational(1)), DomainError);
  CHECK_THROWS_AS(exact(EventKind::RatioPrev, 3, Rational(-1)), DomainError);
  CHECK_THROWS_AS(exact(EventKind::Digit, 0, Rational(1)), DomainError);
}

TEST_CASE("wandering rate and return tail") {
  CHECK(wandering_rate(0) == doctest::Approx(std::log(2.0)));
  CHECK(wandering_rate(98) == doctest::Approx(std::log(100.0)));
  CHECK(return_tail(0) == doctest::Approx(std::log(2.0)));
  CHECK(return_tail(100) == doctest::Approx(0.009852).epsilon(1e-3));
  CHECK(std::abs(return_tail(100) * 101 - 1) < 0.02);
  CHECK(1e7 * return_tail(10'000'000) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("return-tail set is [(n+1)/(n+2), 1]") {
  for (std::uint64_t n = 0; n <= 12; ++n) {
    CAPTURE(n);
    CHECK(return_tail_lower(n) == make_rational(n + 1, n + 2));
    // scan rationals of K1 with denominator <= 60 and compare phi > n with membership
    for (long q = 3; q <= 60; ++q) {
      for (long p = q / 2 + 1; p < q; ++p) {
        const Rational x = make_rational(p, q);
        if (x.get_den() != static_cast<unsigned long>(q)) continue;
        const auto er = entry_return(x);
        REQUIRE(er.phi.has_value());
        CHECK((*er.phi > n) == (x >= return_tail_lower(n)));
      }
    }
  }
}
