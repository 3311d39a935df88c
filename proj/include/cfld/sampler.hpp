#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "cfld/cf_core.hpp"
#include "cfld/rational.hpp"
#include "cfld/tail_query.hpp"

namespace cfld {

// Engine for one independent stream. Stream `s` of master seed `m` is
// mt19937_64 seeded with seed_seq{lo32(m), hi32(m), lo32(s), hi32(s)}.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

// Uniform on (0, 1] with 53 random bits.
inline double uniform_open_closed(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

// Draws digits of a Lebesgue-uniform point one at a time using the
// conditional law P(k_{l+1} >= m | prefix) = (1 + r) / (m + r), where
// r = q_{l-1} / q_l is carried in double precision.
class DigitSampler {
 public:
  explicit DigitSampler(std::uint64_t seed, std::uint64_t stream = 0)
      : rng_(make_stream(seed, stream)) {}
  explicit DigitSampler(std::mt19937_64 engine) : rng_(std::move(engine)) {}

  Digit next() {
    const double u = uniform_open_closed(rng_);
    const double v = (1.0 + r_) / u - r_;
    const Digit k = v >= 0x1.0p63 ? (Digit{1} << 63) : std::max<Digit>(1, static_cast<Digit>(v));
    r_ = 1.0 / (static_cast<double>(k) + r_);
    return k;
  }

  // Start a fresh point; the random stream continues.
  void restart() noexcept { r_ = 0.0; }
  double ratio() const noexcept { return r_; }
  std::mt19937_64& engine() noexcept { return rng_; }

 private:
  std::mt19937_64 rng_;
  double r_ = 0.0;
};

// Exact digit extraction from a uniform real revealed bit by bit. The point
// is known to lie in the open dyadic interval (A/2^k, (A+1)/2^k); a digit is
// emitted once every point of that interval shares it.
class LazyBitDigitSource {
 public:
  LazyBitDigitSource() = default;

  void push_bit(bool bit);
  // Emits the next digit if the bits seen so far determine it.
  std::optional<Digit> try_emit();
  template <class BitGen>
  Digit next(BitGen& rng) {
    for (;;) {
      if (auto d = try_emit()) return *d;
      if (buffered_ == 0) {
        buffer_ = rng();
        buffered_ = 64;
      }
      push_bit(buffer_ & 1u);
      buffer_ >>= 1;
      --buffered_;
    }
  }

  std::size_t bits_used() const noexcept { return bits_; }
  const DigitWord& word() const noexcept { return word_; }

 private:
  BigInt numer_{0};       // A
  std::size_t bits_ = 0;  // k
  BigInt p_{0}, q_{1}, p_prev_{1}, q_prev_{0};
  DigitWord word_;
  std::uint64_t buffer_ = 0;
  int buffered_ = 0;
};

DigitWord lazy_bit_digits(std::mt19937_64& rng, std::size_t count);

enum class SamplerKind { Ratio, LazyBit };

// Initial densities f_a(x) = a x^a with respect to mu (dmu = dx/x), so the
// Lebesgue density is g_a(x) = a x^(a-1). a = 1 is Lebesgue measure.
class FamilyWeight {
 public:
  // Throws DomainError unless 1/2 < a <= 1 (weights need finite variance).
  explicit FamilyWeight(double a);
  double a() const noexcept { return a_; }
  double operator()(double x) const;

 private:
  double a_;
};

// Cylinder of the digits drawn so far, tracked in rescaled doubles.
class CylinderTracker {
 public:
  void reset() noexcept { p_ = 0, q_ = 1, pp_ = 1, qp_ = 0; }
  void push(Digit d) noexcept;
  double lower() const noexcept;
  double upper() const noexcept;
  double width() const noexcept { return upper() - lower(); }

 private:
  double p_ = 0, q_ = 1, pp_ = 1, qp_ = 0;
};

struct WeightBracket {
  double low = 0.0;
  double mid = 0.0;
  double high = 0.0;
};

// Digit stream of a Lebesgue-uniform point together with importance weights
// g_a evaluated on the current cylinder. g_a is monotone, so the weight of
// the (unrevealed) point lies between the endpoint values.
class WeightedDigitStream {
 public:
  WeightedDigitStream(double a, std::uint64_t seed, std::uint64_t stream = 0);

  Digit next();
  void restart();
  // Keeps drawing digits of the same point until the cylinder is narrower
  // than `width` (at most `max_digits` extra digits).
  void refine(double width, std::size_t max_digits = 256);
  WeightBracket weight() const;
  const CylinderTracker& cylinder() const noexcept { return cyl_; }
  double a() const noexcept { return family_.a(); }

 private:
  FamilyWeight family_;
  DigitSampler sampler_;
  CylinderTracker cyl_;
};

WeightedDigitStream sample_initial_from_family(double a, std::uint64_t seed, std::uint64_t stream = 0);

struct TailEstimate {
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

struct McOptions {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0: hardware concurrency
  SamplerKind sampler = SamplerKind::Ratio;
  double family_a = 1.0;  // initial density f_a; 1 = Lebesgue
};

// Samples are split into fixed chunks, chunk c drawing from make_stream(seed, c);
// results are therefore identical for any worker count.
inline constexpr std::uint64_t kChunkSize = 1 << 14;

// Estimates every query on one shared set of sampled points. All queries must
// have the same n. Throws DomainError on invalid queries or samples < 1000.
std::vector<TailEstimate> mc_event_tails(std::span<const TailQuery> queries, const McOptions& options);

TailEstimate mc_event_tail(const TailQuery& q, std::uint64_t samples, std::uint64_t seed);
TailEstimate mc_event_tail(const TailQuery& q, const McOptions& options);

// Stopping profiles at n for `count` independent Lebesgue-uniform points.
std::vector<StoppingProfile> sample_stopping_profiles(std::uint64_t n, std::uint64_t count,
                                                      std::uint64_t seed, unsigned workers = 0);

// First `length` digits of one Lebesgue-uniform point.
std::vector<Digit> sample_digits(std::size_t length, std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace cfld
