#include "cfld/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "cfld/asymptotics.hpp"
#include "cfld/cf_core.hpp"
#include "cfld/errors.hpp"
#include "cfld/farey.hpp"
#include "cfld/measure_oracle.hpp"
#include "cfld/sampler.hpp"
#include "cfld/transfer_op.hpp"

namespace cfld::cli {
namespace {

using Json = nlohmann::ordered_json;

struct Row {
  std::string event;
  std::uint64_t n = 0;
  std::string x;
  std::string y;
  std::string method;
  double value = 0.0;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::optional<double> limit;
  std::optional<double> normalized;
  std::optional<std::uint64_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> exact;  // exact rational, oracle rows only
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

template <class T>
std::string opt(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_same_v<T, double>) {
    return num(*v);
  } else {
    return std::to_string(*v);
  }
}

std::string csv(const std::vector<Row>& rows, const std::string& header) {
  std::ostringstream os;
  os << "# " << header << '\n' << kCsvColumns << '\n';
  for (const auto& r : rows) {
    os << r.event << ',' << r.n << ',' << r.x << ',' << r.y << ',' << r.method << ',' << num(r.value)
       << ',' << opt(r.ci_low) << ',' << opt(r.ci_high) << ',' << opt(r.limit) << ','
       << opt(r.normalized) << ',' << opt(r.samples) << ',' << opt(r.seed) << '\n';
  }
  return os.str();
}

Json json_rows(const std::vector<Row>& rows, const Json& meta) {
  Json doc;
  doc["meta"] = meta;
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json j;
    j["event"] = r.event;
    j["n"] = r.n;
    j["x"] = r.x;
    j["y"] = r.y;
    j["method"] = r.method;
    j["value"] = r.value;
    auto put = [&](const char* key, const auto& v) {
      if (v) {
        j[key] = *v;
      } else {
        j[key] = nullptr;
      }
    };
    put("ci_low", r.ci_low);
    put("ci_high", r.ci_high);
    put("limit_constant", r.limit);
    put("normalized", r.normalized);
    put("samples", r.samples);
    put("seed", r.seed);
    if (r.exact) j["exact"] = *r.exact;
    arr.push_back(std::move(j));
  }
  doc["rows"] = std::move(arr);
  return doc;
}

std::string header_line(const Json& meta) {
  std::string h = "cfld " CFLD_VERSION;
  for (auto it = meta.begin(); it != meta.end(); ++it) {
    if (it.key() == "version") continue;
    h += ' ' + it.key() + '=' + (it->is_string() ? it->get<std::string>() : it->dump());
  }
  return h;
}

struct Output {
  std::string path;    // base path; empty -> stdout
  std::string format = "csv";
};

void emit_rows(const std::vector<Row>& rows, const Json& meta, const Output& o, std::ostream& out) {
  const std::string text_csv = csv(rows, header_line(meta));
  const std::string text_json = json_rows(rows, meta).dump(2) + "\n";
  if (o.path.empty()) {
    out << (o.format == "json" ? text_json : text_csv);
    return;
  }
  std::string base = o.path;
  if (base.size() > 4 && (base.ends_with(".csv") || base.ends_with(".json"))) {
    base = base.substr(0, base.rfind('.'));
  }
  std::ofstream(base + ".csv", std::ios::binary) << text_csv;
  std::ofstream(base + ".json", std::ios::binary) << text_json;
  out << "wrote " << base << ".csv and " << base << ".json\n";
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CFLD_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw CLI::ValidationError("CFLD_SEED", "must be a nonnegative integer");
    }
  }
  return kDefaultSeed;
}

struct QueryArgs {
  std::string event = "joint";
  std::uint64_t n = 1;
  std::string x = "0";
  std::string y = "0";
};

void add_query_options(CLI::App* sub, QueryArgs& q, bool with_n = true) {
  sub->add_option("--event", q.event, "joint | digit | ratio_incl | ratio_prev")->required();
  if (with_n) sub->add_option("--n", q.n, "digit-sum level n")->required();
  sub->add_option("--x", q.x, "threshold x as an exact fraction, e.g. 1/4")->required();
  sub->add_option("--y", q.y, "second JOINT threshold y (fraction)");
}

TailQuery to_query(const QueryArgs& a) {
  TailQuery q;
  q.kind = parse_event(a.event);
  q.n = a.n;
  q.x = parse_rational(a.x);
  q.y = parse_rational(a.y);
  q.validate();
  return q;
}

Json query_meta(const std::string& sub, const TailQuery& q) {
  Json m;
  m["version"] = CFLD_VERSION;
  m["subcommand"] = sub;
  m["event"] = std::string(event_name(q.kind));
  m["n"] = q.n;
  m["x"] = to_string(q.x);
  m["y"] = to_string(q.y);
  return m;
}

Row base_row(const TailQuery& q, const std::string& method) {
  Row r;
  r.event = std::string(event_name(q.kind));
  r.n = q.n;
  r.x = to_string(q.x);
  r.y = to_string(q.y);
  r.method = method;
  return r;
}

Json word_json(const DigitWord& w) {
  Json a = Json::array();
  for (Digit d : w) a.push_back(d);
  return a;
}

std::vector<std::uint64_t> parse_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const double v = std::stod(item);  // accepts 1e5
    if (v < 1 || v != std::floor(v)) throw CLI::ValidationError("list", "entries must be positive integers");
    out.push_back(static_cast<std::uint64_t>(v));
  }
  if (out.empty()) throw CLI::ValidationError("list", "must not be empty");
  return out;
}

std::function<double(double)> parse_initial_density(const std::string& spec) {
  if (spec == "identity" || spec == "x") return [](double x) { return x; };
  if (spec.rfind("power:", 0) == 0) {
    const double a = parse_rational(spec.substr(6)).get_d();
    return [a](double x) { return a * std::pow(x, a); };
  }
  if (spec == "one" || spec == "1") return [](double) { return 1.0; };
  throw CLI::ValidationError("--f", "expected identity, one, or power:<a>");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Continued-fraction digit processes: exact, Monte Carlo and operator tails"};
  app.set_version_flag("--version", std::string(CFLD_VERSION));
  app.require_subcommand(1);

  Output output;
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--out", output.path, "write <base>.csv and <base>.json");
    sub->add_option("--format", output.format, "stdout format")->check(CLI::IsMember({"csv", "json"}));
  };

  // expand
  std::string expand_x;
  std::size_t expand_len = 64;
  auto* expand = app.add_subcommand("expand", "digits, continuants and cylinder of a rational");
  expand->add_option("--x", expand_x, "rational in (0,1)")->required();
  expand->add_option("--max-len", expand_len, "digit limit");

  // orbit
  std::string orbit_x;
  std::size_t orbit_steps = 16;
  std::optional<std::uint64_t> orbit_n;
  auto* orbit = app.add_subcommand("orbit", "Farey orbit and renewal profile of a rational");
  orbit->add_option("--x", orbit_x, "rational in [0,1]")->required();
  orbit->add_option("--steps", orbit_steps, "orbit length");
  orbit->add_option("--n", orbit_n, "time for the renewal profile");

  // exact
  QueryArgs exact_q;
  std::uint64_t cap = kDefaultEnumerationCap;
  auto* exact = app.add_subcommand("exact", "exact Lebesgue probability by prefix enumeration");
  add_query_options(exact, exact_q);
  exact->add_option("--cap", cap, "largest n the enumeration accepts");
  add_output(exact);

  // mc
  QueryArgs mc_q;
  McOptions mc_opts;
  std::optional<std::uint64_t> mc_seed;
  std::string sampler_name = "ratio";
  auto* mc = app.add_subcommand("mc", "Monte Carlo estimate of an event probability");
  add_query_options(mc, mc_q);
  mc->add_option("--samples", mc_opts.samples, "sample count (>= 1000)");
  mc->add_option("--seed", mc_seed, "master seed (default: $CFLD_SEED or 42)");
  mc->add_option("--workers", mc_opts.workers, "threads; results do not depend on it");
  mc->add_option("--sampler", sampler_name)->check(CLI::IsMember({"ratio", "lazy"}));
  mc->add_option("--family-a", mc_opts.family_a, "initial density f_a(x) = a x^a, a in (1/2,1]");
  add_output(mc);

  // transfer
  std::string check = "invariance";
  std::uint64_t tr_n = 256, tr_m = 2, tr_k = 0;
  std::string tr_x = "1/4", tr_y = "1/4", tr_f = "identity";
  GridSpec grid_spec;
  double delta = 0.1;
  auto* transfer = app.add_subcommand("transfer", "transfer-operator diagnostics");
  transfer->add_option("--check", check)
      ->check(CLI::IsMember({"invariance", "returning", "uniform", "ztail", "joint", "class"}));
  transfer->add_option("--n", tr_n, "iteration count / level n");
  transfer->add_option("--m", tr_m, "ztail: m");
  transfer->add_option("--k", tr_k, "ztail: k");
  transfer->add_option("--x", tr_x, "joint: x");
  transfer->add_option("--y", tr_y, "joint: y");
  transfer->add_option("--f", tr_f, "initial density: identity | one | power:<a>");
  transfer->add_option("--nodes", grid_spec.nodes, "grid nodes");
  transfer->add_option("--x-min", grid_spec.x_min, "smallest grid node");
  transfer->add_option("--delta", delta, "I/J split fraction");
  add_output(transfer);

  // limits
  QueryArgs lim_q;
  auto* limits = app.add_subcommand("limits", "limit constants C with P ~ C / log n");
  add_query_options(limits, lim_q, false);
  add_output(limits);

  // report
  std::string n_list = "100,1000,10000,100000";
  std::string sample_list = "1000000,1000000,100000,30000";
  std::optional<std::uint64_t> report_seed;
  std::uint64_t exact_max = 20;
  std::string joint_x = "1/4", joint_y = "1/4", digit_x = "1", incl_x = "1/2", prev_x = "1";
  auto* report = app.add_subcommand("report", "normalized tails of all four events across n");
  report->add_option("--n-list", n_list, "comma separated n values");
  report->add_option("--samples", sample_list, "MC samples per n (one value or one per n)");
  report->add_option("--seed", report_seed, "master seed");
  report->add_option("--exact-max", exact_max, "also enumerate exactly for n up to this");
  report->add_option("--joint-x", joint_x);
  report->add_option("--joint-y", joint_y);
  report->add_option("--digit-x", digit_x);
  report->add_option("--incl-x", incl_x);
  report->add_option("--prev-x", prev_x);
  add_output(report);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*expand) {
      const Rational x = parse_rational(expand_x);
      const auto word = cf_digits(x, expand_len);
      const auto frame = continuant_frame(word);
      const auto cyl = cylinder(word);
      Json j;
      j["x"] = to_string(x);
      j["digits"] = word_json(word);
      j["frame"] = {{"p", frame.p_cur.get_str()}, {"q", frame.q_cur.get_str()},
                    {"p_prev", frame.p_prev.get_str()}, {"q_prev", frame.q_prev.get_str()}};
      j["cylinder"] = {{"lower", to_string(cyl.lower)}, {"upper", to_string(cyl.upper)},
                       {"measure", to_string(cyl.measure())}};
      out << j.dump(2) << '\n';
      return 0;
    }

    if (*orbit) {
      const Rational x = parse_rational(orbit_x);
      const auto rec = farey_orbit(x, orbit_steps);
      Json j;
      j["x"] = to_string(x);
      Json pts = Json::array();
      for (const auto& p : rec.points) pts.push_back(to_string(p));
      j["points"] = pts;
      Json br = Json::array();
      for (auto b : rec.branches) br.push_back(static_cast<int>(b));
      j["branches"] = br;
      try {
        const auto er = entry_return(x);
        j["entry_time"] = er.entry;
        j["return_time"] = er.phi ? Json(*er.phi) : Json(nullptr);
      } catch (const UnresolvedOrbit& e) {
        j["entry_time"] = nullptr;
        j["note"] = e.what();
      }
      if (orbit_n) {
        try {
          const auto p = renewal_profile_from_orbit(x, *orbit_n);
          j["renewal"] = {{"n", *orbit_n}, {"Z", p.z}, {"Y", p.y}, {"V", p.v}, {"N", p.count}, {"in_A", p.in_a}};
        } catch (const std::runtime_error& e) {
          j["renewal"] = {{"n", *orbit_n}, {"error", e.what()}};
        }
      }
      out << j.dump(2) << '\n';
      return 0;
    }

    if (*exact) {
      const auto q = to_query(exact_q);
      const auto tail = exact_event_tail(q, cap);
      Row r = base_row(q, "exact");
      r.value = tail.probability.get_d();
      r.exact = to_string(tail.probability);
      r.limit = limit_constant(q).value;
      r.normalized = std::log(static_cast<double>(q.n)) * r.value / *r.limit;
      Json meta = query_meta("exact", q);
      meta["prefixes"] = tail.prefixes_enumerated;
      emit_rows({r}, meta, output, out);
      return 0;
    }

    if (*mc) {
      const auto q = to_query(mc_q);
      mc_opts.seed = mc_seed.value_or(default_seed());
      mc_opts.sampler = sampler_name == "lazy" ? SamplerKind::LazyBit : SamplerKind::Ratio;
      const auto est = mc_event_tail(q, mc_opts);
      Row r = base_row(q, mc_opts.family_a == 1.0 ? "mc" : "mc_weighted");
      r.value = est.p_hat;
      r.ci_low = est.ci_low;
      r.ci_high = est.ci_high;
      r.limit = limit_constant(q).value;
      r.normalized = std::log(static_cast<double>(q.n)) * r.value / *r.limit;
      r.samples = est.samples;
      r.seed = est.seed;
      Json meta = query_meta("mc", q);
      meta["samples"] = mc_opts.samples;
      meta["seed"] = mc_opts.seed;
      meta["sampler"] = sampler_name;
      meta["family_a"] = mc_opts.family_a;
      emit_rows({r}, meta, output, out);
      return 0;
    }

    if (*transfer) {
      const auto grid = make_grid(grid_spec);
      const auto f = GridDensity::from_function(grid, parse_initial_density(tr_f));
      Json meta;
      meta["version"] = CFLD_VERSION;
      meta["subcommand"] = "transfer";
      meta["check"] = check;
      meta["f"] = tr_f;
      meta["nodes"] = grid_spec.nodes;
      meta["x_min"] = grid_spec.x_min;
      if (check == "joint") {
        TailQuery q;
        q.kind = EventKind::Joint;
        q.n = tr_n;
        q.x = parse_rational(tr_x);
        q.y = parse_rational(tr_y);
        const auto z = joint_via_operator(q, f, delta);
        Row r = base_row(q, "operator");
        r.value = z.value;
        r.limit = limit_constant(q).value;
        r.normalized = std::log(static_cast<double>(q.n)) * r.value / *r.limit;
        meta["n"] = q.n;
        emit_rows({r}, meta, output, out);
        return 0;
      }
      Json j;
      j["meta"] = meta;
      if (check == "invariance") {
        const auto h = GridDensity::from_function(grid, [](double x) { return 1.0 / x; });
        const auto lh = lebesgue_transfer_apply(h);
        double sup = 0.0;
        for (std::size_t i = 0; i < grid->size(); ++i) {
          if (grid->node(i) >= 1e-4) sup = std::max(sup, std::abs(lh.values()[i] - h.values()[i]));
        }
        const auto one = GridDensity::from_function(grid, [](double) { return 1.0; });
        const auto t1 = mu_transfer_power(one, tr_n);
        double sup1 = 0.0;
        for (double v : t1.values()) sup1 = std::max(sup1, std::abs(v - 1.0));
        j["lh_minus_h_sup"] = sup;
        j["t_one_minus_one_sup"] = sup1;
        j["iterations"] = tr_n;
      } else if (check == "class") {
        const auto rep = density_class_check(parse_initial_density(tr_f));
        j["is_in_D"] = rep.is_in_D;
        j["integral_under_mu"] = rep.integral_under_mu;
        j["min_f_prime"] = rep.min_f_prime;
        j["max_f_double_prime"] = rep.max_f_double_prime;
      } else if (check == "ztail") {
        const auto z = z_tail_via_operator(tr_m, tr_k, f, delta);
        j["m"] = tr_m;
        j["k"] = tr_k;
        j["value"] = z.value;
        j["visit_part"] = z.visit_part;
        j["no_visit_part"] = z.no_visit_part;
        j["i_part"] = z.i_part;
        j["j_part"] = z.j_part;
        j["cut"] = z.cut;
      } else {
        const auto mode = check == "returning" ? CheckMode::Returning : CheckMode::Uniform;
        const auto d = returning_uniform_check(f, tr_n, mode);
        j["n"] = tr_n;
        j["sup_dev"] = d.sup_dev;
        j["inf_dev"] = d.inf_dev;
        j["max_abs_dev"] = d.max_abs_dev;
      }
      out << j.dump(2) << '\n';
      return 0;
    }

    if (*limits) {
      lim_q.n = 1;
      const auto q = to_query(lim_q);
      const auto c = limit_constant(q);
      Row r = base_row(q, "limit");
      r.n = 0;
      r.value = c.value;
      r.limit = c.value;
      Json meta = query_meta("limits", q);
      meta.erase("n");
      emit_rows({r}, meta, output, out);
      return 0;
    }

    if (*report) {
      const auto ns = parse_list(n_list);
      auto samples = parse_list(sample_list);
      if (samples.size() == 1) samples.resize(ns.size(), samples.front());
      if (samples.size() != ns.size()) {
        throw CLI::ValidationError("--samples", "give one value or one per n");
      }
      const std::uint64_t seed = report_seed.value_or(default_seed());
      std::vector<Row> rows;
      for (std::size_t i = 0; i < ns.size(); ++i) {
        std::vector<TailQuery> qs(4);
        qs[0] = {EventKind::Joint, ns[i], parse_rational(joint_x), parse_rational(joint_y)};
        qs[1] = {EventKind::Digit, ns[i], parse_rational(digit_x), Rational(0)};
        qs[2] = {EventKind::RatioIncl, ns[i], parse_rational(incl_x), Rational(0)};
        qs[3] = {EventKind::RatioPrev, ns[i], parse_rational(prev_x), Rational(0)};
        McOptions o;
        o.samples = samples[i];
        o.seed = seed + i;
        const auto est = mc_event_tails(qs, o);
        for (std::size_t e = 0; e < qs.size(); ++e) {
          const double c = limit_constant(qs[e]).value;
          const double scale = std::log(static_cast<double>(ns[i])) / c;
          if (ns[i] <= exact_max) {
            const auto t = exact_event_tail(qs[e]);
            Row r = base_row(qs[e], "exact");
            r.value = t.probability.get_d();
            r.exact = to_string(t.probability);
            r.limit = c;
            r.normalized = scale * r.value;
            rows.push_back(r);
          }
          Row r = base_row(qs[e], "mc");
          r.value = est[e].p_hat;
          r.ci_low = est[e].ci_low;
          r.ci_high = est[e].ci_high;
          r.limit = c;
          r.normalized = scale * r.value;
          r.samples = est[e].samples;
          r.seed = est[e].seed;
          rows.push_back(r);
        }
      }
      Json meta;
      meta["version"] = CFLD_VERSION;
      meta["subcommand"] = "report";
      meta["n_list"] = n_list;
      meta["samples"] = sample_list;
      meta["seed"] = seed;
      meta["joint"] = joint_x + ";" + joint_y;
      meta["digit"] = digit_x;
      meta["ratio_incl"] = incl_x;
      meta["ratio_prev"] = prev_x;
      emit_rows(rows, meta, output, out);
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  } catch (const Refused& e) {
    err << "refused: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace cfld::cli
