#include <doctest.h>

#include <cmath>

#include "cfld/errors.hpp"
#include "cfld/measure_oracle.hpp"
#include "cfld/transfer_op.hpp"
#include "oracle.hpp"

using namespace cfld;

namespace {

const auto& grid() {
  static const auto g = make_grid();
  return g;
}

GridDensity on_grid(const std::function<double(double)>& f) { return GridDensity::from_function(grid(), f); }

double sup_diff(const GridDensity& a, const std::function<double(double)>& f, double from = 0.0) {
  double m = 0;
  for (std::size_t i = 0; i < a.grid().size(); ++i) {
    const double x = a.grid().node(i);
    if (x >= from) m = std::max(m, std::abs(a.values()[i] - f(x)));
  }
  return m;
}

}  // namespace

TEST_CASE("grid shape") {
  const auto& g = *grid();
  CHECK(g.size() == 4096);
  CHECK(g.x_min() == doctest::Approx(1e-8));
  CHECK(g.node(g.size() - 1) == doctest::Approx(1.0));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.node(i) > g.node(i - 1));
}

TEST_CASE("interpolation reproduces power laws and falls back to linear") {
  const auto f = on_grid([](double x) { return 0.7 * std::pow(x, 0.6); });
  CHECK(f.log_mode());
  for (double x : {1e-12, 3e-9, 1e-5, 0.123, 0.5, 0.999}) {
    CHECK(f(x) == doctest::Approx(0.7 * std::pow(x, 0.6)).epsilon(1e-12));
  }
  const auto g = on_grid([](double x) { return x < 0.5 ? 0.0 : x - 0.5; });
  CHECK_FALSE(g.log_mode());
  CHECK(g(0.75) == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(g(1e-12) == 0.0);
}

TEST_CASE("quadrature") {
  CHECK(integrate_lebesgue(on_grid([](double) { return 1.0; })) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(integrate_lebesgue(on_grid([](double x) { return 0.75 * std::pow(x, -0.25); })) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(integrate_mu(on_grid([](double x) { return x; })) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(integrate_lebesgue(on_grid([](double x) { return std::sin(3 * x) + 1.0; })) ==
        doctest::Approx(1.0 + (1.0 - std::cos(3.0)) / 3.0).epsilon(1e-10));
  const auto id = on_grid([](double x) { return x; });
  CHECK(integrate_mu(id, 0.25, 0.5) == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(integrate_mu(id, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("invariant density and the Lebesgue operator") {
  const auto h = on_grid([](double x) { return 1.0 / x; });
  CHECK(sup_diff(lebesgue_transfer_apply(h), [](double x) { return 1.0 / x; }, 1e-4) <= 1e-6);

  const auto one = on_grid([](double) { return 1.0; });
  const auto l1 = lebesgue_transfer_apply(one);
  CHECK(l1(1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sup_diff(l1, [](double x) { return 2.0 / ((1 + x) * (1 + x)); }) <= 1e-12);

  for (const auto& g : {one, on_grid([](double x) { return x; }), on_grid([](double x) { return 0.6 * std::pow(x, -0.4); }),
                        on_grid([](double x) { return 2.0 + std::cos(5 * x); })}) {
    auto cur = g;
    for (int step = 0; step < 20; ++step) {
      const auto next = lebesgue_transfer_apply(cur);
      CHECK(std::abs(integrate_lebesgue(next) - integrate_lebesgue(cur)) <= 1e-8);
      for (double v : next.values()) CHECK(v >= 0.0);
      cur = next;
    }
  }
}

TEST_CASE("mu transfer operator") {
  const auto one = on_grid([](double) { return 1.0; });
  for (std::uint64_t n : {1u, 10u, 200u}) CHECK(sup_diff(mu_transfer_power(one, n), [](double) { return 1.0; }) <= 1e-9);

  const auto id = on_grid([](double x) { return x; });
  CHECK(sup_diff(mu_transfer_power(id, 0), [](double x) { return x; }) == 0.0);
  CHECK(sup_diff(mu_transfer_apply(id), [](double x) { return 2 * x / ((1 + x) * (1 + x)); }) <= 1e-12);

  // one step against the composite formula [f(x/(1+x)) + x f(1/(1+x))] / (1+x)
  const double a = 0.7;
  auto fa = [a](double x) { return a * std::pow(x, a); };
  const auto step = mu_transfer_apply(on_grid(fa));
  CHECK(sup_diff(step, [&](double x) { return (fa(x / (1 + x)) + x * fa(1 / (1 + x))) / (1 + x); }) <= 1e-9);

  auto cur = on_grid(fa);
  for (int k = 0; k < 50; ++k) {
    const auto next = mu_transfer_apply(cur);
    CHECK(std::abs(integrate_mu(next) - integrate_mu(cur)) <= 1e-8);
    cur = next;
  }
}

TEST_CASE("density class") {
  auto r = density_class_check([](double x) { return x; });
  CHECK(r.is_in_D);
  CHECK(r.integral_under_mu == doctest::Approx(1.0));
  CHECK(r.min_f_prime > 0.0);

  r = density_class_check([](double x) { return x * x; });
  CHECK_FALSE(r.is_in_D);
  CHECK(r.integral_under_mu == doctest::Approx(0.5));
  CHECK(r.max_f_double_prime > 1.0);

  r = density_class_check([](double x) { return 0.5 * std::sqrt(x); });
  CHECK(r.is_in_D);
  CHECK(r.max_f_double_prime < 0.0);

  CHECK_FALSE(density_class_check([](double) { return 1.0; }).is_in_D);
  CHECK(density_class_check([](double x) { return (2.0 * x - x * x) / 1.5; }).is_in_D);
  CHECK(density_class_check(on_grid([](double x) { return x; })).is_in_D);
  CHECK_FALSE(density_class_check(on_grid([](double) { return 1.0; })).is_in_D);
}

TEST_CASE("returning and uniform diagnostics") {
  const auto id = on_grid([](double x) { return x; });
  double prev = 1e9;
  for (std::uint64_t n : {256u, 1024u, 4096u}) {
    const auto d = returning_uniform_check(id, n, CheckMode::Returning);
    CHECK(d.max_abs_dev < prev);
    CHECK(d.inf_dev <= d.sup_dev);
    prev = d.max_abs_dev;
  }
  CHECK(prev <= 0.35);
  const auto u = returning_uniform_check(id, 1024, CheckMode::Uniform);
  CHECK(u.max_abs_dev < 0.5);
  CHECK_THROWS_AS(returning_uniform_check(on_grid([](double) { return 1.0; }), 64, CheckMode::Returning), DomainError);
  CHECK_THROWS_AS(returning_uniform_check(on_grid([](double x) { return x * x; }), 64, CheckMode::Uniform), DomainError);
  CHECK_THROWS_AS(returning_uniform_check(id, 1, CheckMode::Returning), DomainError);
}

TEST_CASE("z tails through the operator") {
  const auto id = on_grid([](double x) { return x; });
  const auto z = z_tail_via_operator(2, 0, id);
  CHECK(z.value == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(z.no_visit_part == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(z.visit_part == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(z.i_part + z.j_part == doctest::Approx(z.visit_part));

  double prev = 0;
  for (std::uint64_t m : {1u, 4u, 16u, 64u, 256u}) {
    const auto full = z_tail_via_operator(m, m, id);
    CHECK(full.value <= 1.0);
    CHECK(full.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(full.visit_part >= prev);
    prev = full.visit_part;
  }
  CHECK(prev > 0.99);

  const auto split = z_tail_via_operator(100, 60, id, 0.25);
  CHECK(split.cut == 25);
  CHECK(split.i_part > 0.0);
  CHECK(split.i_part + split.j_part == doctest::Approx(split.visit_part));

  CHECK_THROWS_AS(z_tail_via_operator(30, 31, id), DomainError);
  CHECK_THROWS_AS(z_tail_via_operator(kDefaultOperatorBudget + 1, 3, id), Refused);
}

TEST_CASE("operator joint tails agree with the exact oracle") {
  const auto id = on_grid([](double x) { return x; });
  for (std::uint64_t n = 1; n <= 16; ++n) {
    for (auto [x, y] : {std::pair{make_rational(1, 4), make_rational(1, 4)}, {make_rational(1, 2), Rational(0)}, {Rational(0), make_rational(1, 3)}}) {
      const TailQuery q{EventKind::Joint, n, x, y};
      CAPTURE(n);
      CHECK(joint_via_operator(q, id).value == doctest::Approx(exact_event_tail(q).probability.get_d()).epsilon(1e-6));
    }
  }
}

TEST_CASE("operator joint tails under a power density") {
  const double a = 0.75;
  const auto fa = on_grid([a](double x) { return a * std::pow(x, a); });
  for (std::uint64_t n : {2u, 5u, 9u}) {
    const TailQuery q{EventKind::Joint, n, make_rational(1, 4), make_rational(1, 4)};
    const double target = oracle::event_probability_power(n, oracle::joint(n, oracle::rat(1, 4), oracle::rat(1, 4)), 4 * n + 8, a);
    CAPTURE(n);
    CHECK(joint_via_operator(q, fa).value == doctest::Approx(target).epsilon(1e-6));
  }
}
