#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cfld/asymptotics.hpp"
#include "cfld/cf_core.hpp"
#include "cfld/errors.hpp"
#include "cfld/farey.hpp"
#include "cfld/measure_oracle.hpp"
#include "cfld/sampler.hpp"
#include "cfld/transfer_op.hpp"

namespace py = pybind11;
using namespace cfld;

namespace {

// Rationals cross the boundary as "p/q" strings; the Python side wraps them in Fraction.
std::vector<Digit> to_vec(const DigitWord& w) { return {w.begin(), w.end()}; }

TailQuery make_query(const std::string& event, std::uint64_t n, const std::string& x, const std::string& y) {
  TailQuery q{parse_event(event), n, parse_rational(x), parse_rational(y)};
  q.validate();
  return q;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "continued-fraction digit processes";
  m.attr("__version__") = CFLD_VERSION;

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<InsufficientDigits>(m, "InsufficientDigits", PyExc_RuntimeError);
  py::register_exception<Refused>(m, "Refused", PyExc_RuntimeError);
  py::register_exception<UnresolvedOrbit>(m, "UnresolvedOrbit", PyExc_RuntimeError);

  m.def("cf_digits", [](const std::string& x, std::size_t max_len) {
    return to_vec(cf_digits(parse_rational(x), max_len));
  }, py::arg("x"), py::arg("max_len") = 64);

  m.def("gauss_map", [](const std::string& x) { return to_string(gauss_map(parse_rational(x))); });

  m.def("cylinder", [](const std::vector<Digit>& word) {
    const auto c = cylinder(DigitWord(word));
    return py::make_tuple(to_string(c.lower), to_string(c.upper));
  });

  m.def("child_tail_measure", [](const std::vector<Digit>& word, std::uint64_t k) {
    return to_string(child_tail_measure(DigitWord(word), k));
  });

  m.def("stopping_profile", [](const std::vector<Digit>& word, std::uint64_t n) {
    const auto p = stopping_profile(std::span<const Digit>(word), n);
    return py::dict(py::arg("theta") = p.theta, py::arg("s_theta") = p.s_theta,
                    py::arg("s_theta_next") = p.s_theta_next, py::arg("kappa_next") = p.kappa_next);
  });

  m.def("farey_map", [](const std::string& x) { return to_string(farey_map(parse_rational(x))); });

  m.def("entry_return", [](const std::string& x) {
    const auto er = entry_return(parse_rational(x));
    return py::make_tuple(er.entry, er.phi ? py::cast(*er.phi) : py::none());
  });

  m.def("renewal_profile", [](const std::vector<Digit>& word, std::uint64_t n) {
    const auto p = renewal_profile_from_word(std::span<const Digit>(word), n);
    return py::dict(py::arg("Z") = p.z, py::arg("Y") = p.y, py::arg("V") = p.v,
                    py::arg("N") = p.count, py::arg("in_A") = p.in_a);
  });

  m.def("exact_event_tail",
        [](const std::string& event, std::uint64_t n, const std::string& x, const std::string& y,
           std::uint64_t cap) {
          const auto q = make_query(event, n, x, y);
          py::gil_scoped_release release;
          return to_string(exact_event_tail(q, cap).probability);
        },
        py::arg("event"), py::arg("n"), py::arg("x"), py::arg("y") = "0",
        py::arg("cap") = kDefaultEnumerationCap);

  m.def("mc_event_tail",
        [](const std::string& event, std::uint64_t n, const std::string& x, const std::string& y,
           std::uint64_t samples, std::uint64_t seed, unsigned workers, double family_a) {
          const auto q = make_query(event, n, x, y);
          McOptions o;
          o.samples = samples;
          o.seed = seed;
          o.workers = workers;
          o.family_a = family_a;
          TailEstimate e;
          {
            py::gil_scoped_release release;
            e = mc_event_tail(q, o);
          }
          return py::dict(py::arg("p_hat") = e.p_hat, py::arg("ci_low") = e.ci_low,
                          py::arg("ci_high") = e.ci_high, py::arg("std_error") = e.std_error,
                          py::arg("samples") = e.samples, py::arg("seed") = e.seed);
        },
        py::arg("event"), py::arg("n"), py::arg("x"), py::arg("y") = "0",
        py::arg("samples") = 100000, py::arg("seed") = 42, py::arg("workers") = 0,
        py::arg("family_a") = 1.0);

  m.def("limit_constant",
        [](const std::string& event, const std::string& x, const std::string& y) {
          return limit_constant(make_query(event, 1, x, y)).value;
        },
        py::arg("event"), py::arg("x"), py::arg("y") = "0");

  m.def("z_tail", [](std::uint64_t m_, std::uint64_t k, double delta) {
    const auto f = GridDensity::from_function(make_grid(), [](double x) { return x; });
    const auto z = z_tail_via_operator(m_, k, f, delta);
    return py::dict(py::arg("value") = z.value, py::arg("visit_part") = z.visit_part,
                    py::arg("no_visit_part") = z.no_visit_part);
  }, py::arg("m"), py::arg("k"), py::arg("delta") = 0.1);

  m.def("returning_deviation", [](std::uint64_t n, bool uniform) {
    const auto f = GridDensity::from_function(make_grid(), [](double x) { return x; });
    return returning_uniform_check(f, n, uniform ? CheckMode::Uniform : CheckMode::Returning).max_abs_dev;
  }, py::arg("n"), py::arg("uniform") = false);

  m.def("sample_digits", &sample_digits, py::arg("length"), py::arg("seed") = 42, py::arg("stream") = 0);

  m.def("khinchin_stats", [](const std::vector<Digit>& word) {
    const auto s = khinchin_stats(std::span<const Digit>(word));
    return py::make_tuple(s.geometric_mean, s.trimmed_ratio);
  });
}
