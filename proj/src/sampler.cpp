#include "cfld/sampler.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "cfld/errors.hpp"

namespace cfld {

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

// ---------------------------------------------------------------------------
// Lazy-bit exact digits

void LazyBitDigitSource::push_bit(bool bit) {
  numer_ <<= 1;
  if (bit) numer_ += 1;
  ++bits_;
}

std::optional<Digit> LazyBitDigitSource::try_emit() {
  // For an endpoint x = X / 2^k of the dyadic interval, the remaining tail
  // t = G^l(x) satisfies 1/t = (X q' - p' 2^k) / (p 2^k - X q).
  BigInt scale = 1;
  scale <<= bits_;
  auto inverse_tail = [&](const BigInt& X, Rational& out) -> bool {
    BigInt num = X * q_prev_ - p_prev_ * scale;
    BigInt den = p_ * scale - X * q_;
    if (den == 0) return false;  // t = 0: 1/t unbounded
    if (sgn(den) < 0) {
      num = -num;
      den = -den;
    }
    out = Rational(num, den);
    out.canonicalize();
    return true;
  };

  Rational a;
  Rational b;
  if (!inverse_tail(numer_, a) || !inverse_tail(BigInt(numer_ + 1), b)) return std::nullopt;
  if (b < a) std::swap(a, b);
  // 1/t ranges over the open interval (a, b); the digit is fixed iff that
  // interval lies inside [d, d + 1] with d = floor(a).
  const BigInt d = floor(a);
  if (b > d + 1 || d < 1) return std::nullopt;
  if (!fits_u64(d)) return std::nullopt;

  const Digit digit = to_u64(d);
  BigInt p_next = d * p_ + p_prev_;
  BigInt q_next = d * q_ + q_prev_;
  p_prev_ = std::move(p_);
  q_prev_ = std::move(q_);
  p_ = std::move(p_next);
  q_ = std::move(q_next);
  word_.push_back(digit);
  return digit;
}

DigitWord lazy_bit_digits(std::mt19937_64& rng, std::size_t count) {
  LazyBitDigitSource source;
  for (std::size_t i = 0; i < count; ++i) source.next(rng);
  return source.word();
}

// ---------------------------------------------------------------------------
// Initial-density family and weighted streams

FamilyWeight::FamilyWeight(double a) : a_(a) {
  if (!(a > 0.5 && a <= 1.0)) {
    throw DomainError("family exponent a must lie in (1/2, 1]; got " + std::to_string(a));
  }
}

double FamilyWeight::operator()(double x) const {
  if (a_ == 1.0) return 1.0;
  if (x <= 0.0) return std::numeric_limits<double>::infinity();
  return a_ * std::pow(x, a_ - 1.0);
}

void CylinderTracker::push(Digit d) noexcept {
  const double k = static_cast<double>(d);
  const double p = k * p_ + pp_;
  const double q = k * q_ + qp_;
  pp_ = p_;
  qp_ = q_;
  p_ = p;
  q_ = q;
  if (q_ > 1e200) {
    const double s = 1.0 / q_;
    p_ *= s, q_ *= s, pp_ *= s, qp_ *= s;
  }
}

double CylinderTracker::lower() const noexcept {
  return std::min(p_ / q_, (p_ + pp_) / (q_ + qp_));
}

double CylinderTracker::upper() const noexcept {
  return std::max(p_ / q_, (p_ + pp_) / (q_ + qp_));
}

WeightedDigitStream::WeightedDigitStream(double a, std::uint64_t seed, std::uint64_t stream)
    : family_(a), sampler_(seed, stream) {}

Digit WeightedDigitStream::next() {
  const Digit d = sampler_.next();
  cyl_.push(d);
  return d;
}

void WeightedDigitStream::restart() {
  sampler_.restart();
  cyl_.reset();
}

void WeightedDigitStream::refine(double width, std::size_t max_digits) {
  for (std::size_t i = 0; i < max_digits && cyl_.width() > width; ++i) next();
}

WeightBracket WeightedDigitStream::weight() const {
  const double lo = cyl_.lower();
  const double hi = cyl_.upper();
  // a <= 1: g_a is nonincreasing.
  return {family_(hi), family_(0.5 * (lo + hi)), family_(lo)};
}

WeightedDigitStream sample_initial_from_family(double a, std::uint64_t seed, std::uint64_t stream) {
  return WeightedDigitStream(a, seed, stream);
}

// ---------------------------------------------------------------------------
// Monte Carlo tails

namespace {

constexpr double kZ95 = 1.959963984540054;

unsigned resolve_workers(unsigned requested, std::size_t chunks) {
  unsigned w = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(chunks, 1)));
}

// Runs fn(chunk_index, first_sample, count) over all chunks and returns the
// per-chunk results in chunk order.
template <class Result, class Fn>
std::vector<Result> run_chunks(std::uint64_t total, unsigned workers, Fn fn) {
  const std::size_t chunks = (total + kChunkSize - 1) / kChunkSize;
  std::vector<Result> results(chunks);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) {
      const std::uint64_t first = c * kChunkSize;
      results[c] = fn(c, first, std::min<std::uint64_t>(kChunkSize, total - first));
    }
  };
  const unsigned w = resolve_workers(workers, chunks);
  if (w <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < w; ++i) pool.emplace_back(work);
  }
  return results;
}

struct Accumulator {
  std::vector<double> sum;       // sum of w * 1{event}
  std::vector<double> sum_sq;    // sum of (w * 1{event})^2
  std::vector<double> sum_low;   // lower weight bracket
  std::vector<double> sum_high;  // upper weight bracket
};

TailEstimate unweighted_estimate(double hits, std::uint64_t n, std::uint64_t seed) {
  TailEstimate e;
  const double N = static_cast<double>(n);
  e.samples = n;
  e.seed = seed;
  e.p_hat = hits / N;
  e.std_error = std::sqrt(e.p_hat * (1.0 - e.p_hat) / N);
  if (hits == 0.0) {
    e.ci_low = 0.0;
    e.ci_high = 1.0 - std::pow(0.025, 1.0 / N);
  } else if (hits == N) {
    e.ci_low = std::pow(0.025, 1.0 / N);
    e.ci_high = 1.0;
  } else {
    const double half = kZ95 * e.std_error + 0.5 / N;
    e.ci_low = std::max(0.0, e.p_hat - half);
    e.ci_high = std::min(1.0, e.p_hat + half);
  }
  return e;
}

TailEstimate weighted_estimate(double sum, double sum_sq, double low, double high, std::uint64_t n,
                               std::uint64_t seed) {
  TailEstimate e;
  const double N = static_cast<double>(n);
  e.samples = n;
  e.seed = seed;
  e.p_hat = sum / N;
  const double var = std::max(0.0, sum_sq / N - e.p_hat * e.p_hat);
  e.std_error = std::sqrt(var / N);
  e.ci_low = std::clamp(low / N - kZ95 * e.std_error, 0.0, e.p_hat);
  e.ci_high = std::clamp(high / N + kZ95 * e.std_error, e.p_hat, 1.0);
  return e;
}

// Draws digits until the running sum exceeds n and returns the profile.
template <class Source>
StoppingProfile draw_profile(Source&& next_digit, std::uint64_t n) {
  StoppingProfile p;
  std::uint64_t sum = 0;
  for (std::uint64_t l = 0;; ++l) {
    const Digit d = next_digit();
    if (d > n - sum) {
      p.theta = l;
      p.s_theta = sum;
      p.kappa_next = d;
      p.s_theta_next = sum + d;
      return p;
    }
    sum += d;
  }
}

}  // namespace

std::vector<TailEstimate> mc_event_tails(std::span<const TailQuery> queries, const McOptions& options) {
  if (queries.empty()) return {};
  if (options.samples < 1000) throw DomainError("mc: need at least 1000 samples");
  const std::uint64_t n = queries.front().n;
  std::vector<EventPredicate> preds;
  for (const auto& q : queries) {
    q.validate();
    if (q.n != n) throw DomainError("mc: all queries in one batch must share n");
    preds.emplace_back(q);
  }
  const bool weighted = options.family_a != 1.0;
  if (weighted) static_cast<void>(FamilyWeight(options.family_a));
  if (weighted && options.sampler == SamplerKind::LazyBit) {
    throw DomainError("mc: weighted sampling uses the ratio sampler");
  }
  const std::size_t nq = queries.size();

  auto chunk = [&](std::size_t c, std::uint64_t, std::uint64_t count) {
    Accumulator acc{std::vector<double>(nq), std::vector<double>(nq), std::vector<double>(nq),
                    std::vector<double>(nq)};
    if (options.sampler == SamplerKind::LazyBit) {
      auto rng = make_stream(options.seed, c);
      for (std::uint64_t i = 0; i < count; ++i) {
        LazyBitDigitSource src;
        const auto prof = draw_profile([&] { return src.next(rng); }, n);
        for (std::size_t j = 0; j < nq; ++j) acc.sum[j] += preds[j](prof) ? 1.0 : 0.0;
      }
    } else if (!weighted) {
      DigitSampler s(options.seed, c);
      for (std::uint64_t i = 0; i < count; ++i) {
        s.restart();
        const auto prof = draw_profile([&] { return s.next(); }, n);
        for (std::size_t j = 0; j < nq; ++j) acc.sum[j] += preds[j](prof) ? 1.0 : 0.0;
      }
    } else {
      WeightedDigitStream s(options.family_a, options.seed, c);
      for (std::uint64_t i = 0; i < count; ++i) {
        s.restart();
        const auto prof = draw_profile([&] { return s.next(); }, n);
        s.refine(1e-12);
        const auto w = s.weight();
        for (std::size_t j = 0; j < nq; ++j) {
          if (!preds[j](prof)) continue;
          acc.sum[j] += w.mid;
          acc.sum_sq[j] += w.mid * w.mid;
          acc.sum_low[j] += w.low;
          acc.sum_high[j] += w.high;
        }
      }
    }
    return acc;
  };

  const auto parts = run_chunks<Accumulator>(options.samples, options.workers, chunk);
  std::vector<TailEstimate> out;
  for (std::size_t j = 0; j < nq; ++j) {
    double sum = 0, sum_sq = 0, low = 0, high = 0;
    for (const auto& a : parts) {
      sum += a.sum[j];
      sum_sq += a.sum_sq[j];
      low += a.sum_low[j];
      high += a.sum_high[j];
    }
    out.push_back(weighted ? weighted_estimate(sum, sum_sq, low, high, options.samples, options.seed)
                           : unweighted_estimate(sum, options.samples, options.seed));
  }
  return out;
}

TailEstimate mc_event_tail(const TailQuery& q, const McOptions& options) {
  return mc_event_tails(std::span<const TailQuery>(&q, 1), options).front();
}

TailEstimate mc_event_tail(const TailQuery& q, std::uint64_t samples, std::uint64_t seed) {
  McOptions o;
  o.samples = samples;
  o.seed = seed;
  return mc_event_tail(q, o);
}

std::vector<StoppingProfile> sample_stopping_profiles(std::uint64_t n, std::uint64_t count,
                                                      std::uint64_t seed, unsigned workers) {
  auto chunk = [&](std::size_t c, std::uint64_t, std::uint64_t m) {
    std::vector<StoppingProfile> out;
    out.reserve(m);
    DigitSampler s(seed, c);
    for (std::uint64_t i = 0; i < m; ++i) {
      s.restart();
      out.push_back(draw_profile([&] { return s.next(); }, n));
    }
    return out;
  };
  const auto parts = run_chunks<std::vector<StoppingProfile>>(count, workers, chunk);
  std::vector<StoppingProfile> out;
  out.reserve(count);
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<Digit> sample_digits(std::size_t length, std::uint64_t seed, std::uint64_t stream) {
  DigitSampler s(seed, stream);
  std::vector<Digit> out(length);
  for (auto& d : out) d = s.next();
  return out;
}

}  // namespace cfld
