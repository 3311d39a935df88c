#include "cfld/measure_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>
#include <utility>

#include "cfld/errors.hpp"

namespace cfld {
namespace {

using u128 = unsigned __int128;

// Pairwise (binary-counter) summation of exact rationals. Partial sums at the
// same level are merged, so operand sizes stay balanced and every merge
// reduces by the gcd while numbers are still small.
class PairwiseSum {
 public:
  void add(Rational value) {
    unsigned level = 0;
    while (!stack_.empty() && stack_.back().second == level) {
      value += stack_.back().first;
      stack_.pop_back();
      ++level;
    }
    stack_.emplace_back(std::move(value), level);
  }

  Rational total() const {
    Rational out(0);
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) out += it->first;
    return out;
  }

 private:
  std::vector<std::pair<Rational, unsigned>> stack_;
};

struct Threshold {
  bool active = false;
  bool small = false;      // fits in 64 bits
  std::uint64_t value = 0;
  BigInt big;
};

class Enumerator {
 public:
  Enumerator(std::uint64_t n, const std::vector<Threshold>& thresholds)
      : n_(n), thresholds_(thresholds) {}

  // Contribution of the single prefix with sum s and continuants (q, q_prev).
  void leaf(std::uint64_t s, std::uint64_t q, std::uint64_t q_prev) {
    ++count_;
    const Threshold& t = thresholds_[s];
    if (!t.active) return;
    if (t.small) {
      const u128 den = u128(q) * (u128(t.value) * q + q_prev);
      sum_.add(Rational(BigInt(1), to_big(den)));
    } else {
      const BigInt bq = to_big(q);
      sum_.add(Rational(BigInt(1), BigInt(bq * (t.big * bq + to_big(q_prev)))));
    }
  }

  // The prefix itself and all of its extensions with sum <= n.
  void subtree(std::uint64_t s, std::uint64_t q, std::uint64_t q_prev) {
    leaf(s, q, q_prev);
    for (std::uint64_t d = 1; s + d <= n_; ++d) subtree(s + d, d * q + q_prev, q);
  }

  Rational total() const { return sum_.total(); }
  std::uint64_t count() const { return count_; }

 private:
  std::uint64_t n_;
  const std::vector<Threshold>& thresholds_;
  PairwiseSum sum_;
  std::uint64_t count_ = 0;
};

// Work unit: either a single prefix node or a whole subtree below a prefix.
struct Task {
  std::uint64_t s, q, q_prev;
  bool whole_subtree;
};

std::vector<Task> make_tasks(std::uint64_t n) {
  std::vector<Task> tasks;
  tasks.push_back({0, 1, 0, false});  // empty prefix, theta = 0
  for (std::uint64_t a = 1; a <= n; ++a) {
    const std::uint64_t qa = a;  // continuants of [a]: q = a, q_prev = 1
    tasks.push_back({a, qa, 1, false});
    for (std::uint64_t b = 1; a + b <= n; ++b) tasks.push_back({a + b, b * qa + 1, qa, true});
  }
  return tasks;
}

}  // namespace

std::vector<std::optional<BigInt>> next_digit_thresholds(const TailQuery& q) {
  q.validate();
  const Rational n(to_big(q.n));
  std::vector<std::optional<BigInt>> out(q.n + 1);
  for (std::uint64_t s = 0; s <= q.n; ++s) {
    const Rational rs(to_big(s));
    std::optional<Rational> bound;  // event requires k > bound
    switch (q.kind) {
      case EventKind::Joint:
        if (n - rs > n * q.x) bound = n * (1 + q.y) - rs;
        break;
      case EventKind::Digit:
        bound = n * q.x;
        break;
      case EventKind::RatioIncl:
        bound = q.x * rs / (1 - q.x);
        break;
      case EventKind::RatioPrev:
        if (s > 0) bound = q.x * rs;
        break;
    }
    if (!bound) continue;
    BigInt m = floor(*bound) + 1;
    const BigInt crossing = to_big(q.n - s + 1);
    if (m < crossing) m = crossing;
    out[s] = std::move(m);
  }
  return out;
}

ExactTail exact_tail_by_threshold(std::uint64_t n, std::span<const std::optional<BigInt>> min_next,
                                  std::uint64_t cap) {
  if (n > cap) {
    throw Refused("exact enumeration refused: n = " + std::to_string(n) + " exceeds cap " +
                  std::to_string(cap) + " (work grows like 2^n)");
  }
  if (min_next.size() != n + 1) throw DomainError("threshold table must have n + 1 entries");

  std::vector<Threshold> thresholds(n + 1);
  for (std::uint64_t s = 0; s <= n; ++s) {
    if (!min_next[s]) continue;
    if (*min_next[s] < to_big(n - s + 1)) throw DomainError("threshold below the crossing digit");
    auto& t = thresholds[s];
    t.active = true;
    t.small = fits_u64(*min_next[s]);
    if (t.small) t.value = to_u64(*min_next[s]);
    t.big = *min_next[s];
  }

  const auto tasks = make_tasks(n);
  std::vector<Rational> partial(tasks.size());
  std::vector<std::uint64_t> counts(tasks.size(), 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      Enumerator e(n, thresholds);
      const Task& t = tasks[i];
      if (t.whole_subtree) {
        e.subtree(t.s, t.q, t.q_prev);
      } else {
        e.leaf(t.s, t.q, t.q_prev);
      }
      partial[i] = e.total();
      counts[i] = e.count();
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(hw, tasks.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  ExactTail out;
  PairwiseSum sum;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    sum.add(partial[i]);
    out.prefixes_enumerated += counts[i];
  }
  out.probability = sum.total();
  return out;
}

ExactTail exact_event_tail(const TailQuery& q, std::uint64_t cap) {
  q.validate();
  if (q.n > cap) {
    throw Refused("exact enumeration refused: n = " + std::to_string(q.n) + " exceeds cap " +
                  std::to_string(cap) + " (work grows like 2^n)");
  }
  const auto thresholds = next_digit_thresholds(q);
  return exact_tail_by_threshold(q.n, thresholds, cap);
}

double wandering_rate(std::uint64_t n) { return std::log(static_cast<double>(n) + 2.0); }

Rational return_tail_lower(std::uint64_t n) {
  Rational out(to_big(n + 1), to_big(n + 2));
  out.canonicalize();
  return out;
}

double return_tail(std::uint64_t n) { return std::log1p(1.0 / (static_cast<double>(n) + 1.0)); }

}  // namespace cfld
