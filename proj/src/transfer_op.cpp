#include "cfld/transfer_op.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "cfld/errors.hpp"
#include "cfld/measure_oracle.hpp"

namespace cfld {

// ---------------------------------------------------------------------------
// Grid

LogGrid::LogGrid(GridSpec spec) {
  if (spec.nodes < 8) throw DomainError("grid needs at least 8 nodes");
  if (!(spec.x_min > 0.0 && spec.x_min < 1.0)) throw DomainError("grid x_min must lie in (0,1)");
  t0_ = std::log(spec.x_min);
  h_ = -t0_ / static_cast<double>(spec.nodes - 1);
  x_.resize(spec.nodes);
  for (std::size_t i = 0; i < spec.nodes; ++i) x_[i] = std::exp(t0_ + h_ * static_cast<double>(i));
  x_.front() = spec.x_min;
  x_.back() = 1.0;

  left_.reserve(spec.nodes);
  right_.reserve(spec.nodes);
  for (double x : x_) {
    left_.push_back(stencil(x / (1.0 + x)));
    right_.push_back(stencil(1.0 / (1.0 + x)));
  }
}

LogGrid::Stencil LogGrid::stencil(double x) const {
  Stencil s;
  const std::size_t n = x_.size();
  const double u = (std::log(x) - t0_) / h_;
  s.offset = u;
  if (u < 0.0) {
    s.below = true;
    return s;
  }
  const double uc = std::min(u, static_cast<double>(n - 1));
  const auto i = static_cast<std::size_t>(uc);

  s.left = static_cast<std::uint32_t>(std::min(i, n - 2));
  s.frac = uc - static_cast<double>(s.left);

  const std::size_t start = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(i) - 1, 0,
                                                       static_cast<std::ptrdiff_t>(n - 4));
  s.start = static_cast<std::uint32_t>(start);
  const double v = uc - static_cast<double>(start);
  s.cubic = {-(v - 1.0) * (v - 2.0) * (v - 3.0) / 6.0, v * (v - 2.0) * (v - 3.0) / 2.0,
             -v * (v - 1.0) * (v - 3.0) / 2.0, v * (v - 1.0) * (v - 2.0) / 6.0};
  return s;
}

std::shared_ptr<const LogGrid> make_grid(GridSpec spec) { return std::make_shared<const LogGrid>(spec); }

// ---------------------------------------------------------------------------
// Grid densities

GridDensity::GridDensity(std::shared_ptr<const LogGrid> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw DomainError("grid density needs a grid");
  if (values_.size() != grid_->size()) throw DomainError("grid density: value count does not match grid");
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("grid density values must be finite");
  }
  log_mode_ = std::all_of(values_.begin(), values_.end(), [](double v) { return v > 0.0; });
  if (log_mode_) {
    logs_.resize(values_.size());
    std::transform(values_.begin(), values_.end(), logs_.begin(), [](double v) { return std::log(v); });
  }
}

GridDensity GridDensity::from_function(std::shared_ptr<const LogGrid> grid,
                                       const std::function<double(double)>& f) {
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->node(i));
  return GridDensity(std::move(grid), std::move(v));
}

double GridDensity::at(const LogGrid::Stencil& s) const {
  if (log_mode_) {
    if (s.below) return std::exp(logs_[0] + s.offset * (logs_[1] - logs_[0]));
    const double* l = logs_.data() + s.start;
    return std::exp(s.cubic[0] * l[0] + s.cubic[1] * l[1] + s.cubic[2] * l[2] + s.cubic[3] * l[3]);
  }
  if (s.below) return values_[0];
  return (1.0 - s.frac) * values_[s.left] + s.frac * values_[s.left + 1];
}

double GridDensity::operator()(double x) const {
  if (x <= 0.0) {
    if (!log_mode_) return values_[0];
    const double slope = (logs_[1] - logs_[0]) / grid_->step();
    if (slope > 0) return 0.0;
    if (slope < 0) return std::numeric_limits<double>::infinity();
    return values_[0];
  }
  return at(grid_->stencil(std::min(x, 1.0)));
}

// ---------------------------------------------------------------------------
// Quadrature

namespace {

// Fourth-order Gregory weights for a uniformly spaced sample (unit spacing).
double gregory_sum(std::span<const double> f) {
  const std::size_t n = f.size();
  double s = 0.0;
  for (std::size_t i = 3; i + 3 < n; ++i) s += f[i];
  s += 3.0 / 8.0 * (f[0] + f[n - 1]) + 7.0 / 6.0 * (f[1] + f[n - 2]) + 23.0 / 24.0 * (f[2] + f[n - 3]);
  return s;
}

// d log g / d log x on the first grid cell (the exponent of the extension).
double first_cell_exponent(const GridDensity& g) {
  const auto v = g.values();
  return std::log(v[1] / v[0]) / g.grid().step();
}

// Integral of g(x) x^shift over (a, x_min] using the extension below x_min.
double tail_integral(const GridDensity& g, double a, double shift) {
  const auto v = g.values();
  const double x0 = g.grid().x_min();
  if (a >= x0) return 0.0;
  if (!g.log_mode()) {
    if (v[0] == 0.0) return 0.0;
    // constant clamp
    const double p = shift + 1.0;
    if (p == 0.0) return a > 0.0 ? v[0] * std::log(x0 / a) : std::numeric_limits<double>::infinity();
    if (p < 0.0 && a == 0.0) return std::numeric_limits<double>::infinity();
    return v[0] * (std::pow(x0, p) - std::pow(a, p)) / p;
  }
  const double p = first_cell_exponent(g) + shift + 1.0;  // g x^shift ~ x^(p-1)
  const double c = v[0] * std::pow(x0, shift);             // value of g x^shift at x0
  if (p == 0.0) return a > 0.0 ? c * std::log(x0 / a) : std::numeric_limits<double>::infinity();
  if (p < 0.0 && a == 0.0) return std::numeric_limits<double>::infinity();
  return c * x0 / p * (1.0 - std::pow(a / x0, p));
}

using Gauss = boost::math::quadrature::gauss<double, 20>;

// Integral of g(x) x^shift over [a, b] within the grid range, Gauss-Legendre
// panels in t = log x (integrand g(e^t) e^{(shift+1) t}).
double panel_integral(const GridDensity& g, double a, double b, double shift) {
  if (b <= a) return 0.0;
  const double ta = std::log(a);
  const double tb = std::log(b);
  const int panels = std::max(1, static_cast<int>(std::ceil((tb - ta) / 0.25)));
  const double w = (tb - ta) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = ta + w * p;
    total += Gauss::integrate([&](double t) { return g(std::exp(t)) * std::exp((shift + 1.0) * t); }, lo,
                              lo + w);
  }
  return total;
}

double grid_integral(const GridDensity& g, double shift) {
  const auto& grid = g.grid();
  std::vector<double> integrand(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    integrand[i] = g.values()[i] * std::pow(grid.node(i), shift + 1.0);
  }
  return grid.step() * gregory_sum(integrand) + tail_integral(g, 0.0, shift);
}

}  // namespace

double integrate_lebesgue(const GridDensity& g) { return grid_integral(g, 0.0); }

double integrate_mu(const GridDensity& f) { return grid_integral(f, -1.0); }

double integrate_mu(const GridDensity& f, double a, double b) {
  if (!(0.0 <= a && a < b && b <= 1.0)) throw DomainError("integrate_mu: need 0 <= a < b <= 1");
  const double x0 = f.grid().x_min();
  return tail_integral(f, a, -1.0) - tail_integral(f, std::min(b, x0), -1.0) +
         panel_integral(f, std::max(a, x0), b, -1.0);
}

// ---------------------------------------------------------------------------
// Operators

GridDensity lebesgue_transfer_apply(const GridDensity& g) {
  const auto& grid = g.grid();
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    const double s = 1.0 + x;
    out[i] = (g.at(grid.left_branch(i)) + g.at(grid.right_branch(i))) / (s * s);
  }
  return GridDensity(g.grid_ptr(), std::move(out));
}

GridDensity mu_transfer_apply(const GridDensity& f) {
  const auto& grid = f.grid();
  std::vector<double> hf(grid.size());
  for (std::size_t i = 0; i < hf.size(); ++i) hf[i] = f.values()[i] / grid.node(i);
  const GridDensity lhf = lebesgue_transfer_apply(GridDensity(f.grid_ptr(), std::move(hf)));
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = grid.node(i) * lhf.values()[i];
  return GridDensity(f.grid_ptr(), std::move(out));
}

GridDensity mu_transfer_power(const GridDensity& f, std::uint64_t n) {
  GridDensity cur = f;
  for (std::uint64_t i = 0; i < n; ++i) cur = mu_transfer_apply(cur);
  return cur;
}

// ---------------------------------------------------------------------------
// Density class

namespace {

std::vector<double> check_points(double lo) {
  std::vector<double> pts;
  constexpr int kPerSide = 200;
  const double a = std::log(lo);
  const double b = std::log(0.5);
  for (int i = 0; i < kPerSide; ++i) {
    const double x = std::exp(a + (b - a) * i / (kPerSide - 1));
    pts.push_back(x);
    if (x < 0.5) pts.push_back(1.0 - x);
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

DensityClassReport shape_report(const std::function<double(double)>& f, double lo, double integral) {
  DensityClassReport r;
  r.integral_under_mu = integral;
  r.min_f_prime = std::numeric_limits<double>::infinity();
  r.max_f_double_prime = -std::numeric_limits<double>::infinity();
  r.max_scaled_curvature = -std::numeric_limits<double>::infinity();
  for (double x : check_points(lo)) {
    const double m = std::min(x, 1.0 - x);
    const double d = 0.05 * m;
    const double fm = f(x - d);
    const double f0 = f(x);
    const double fp = f(x + d);
    const double d1 = (fp - fm) / (2.0 * d);
    const double d2 = (fp - 2.0 * f0 + fm) / (d * d);
    r.min_f_prime = std::min(r.min_f_prime, d1);
    r.max_f_double_prime = std::max(r.max_f_double_prime, d2);
    const double scale = std::max(std::abs(f0), std::numeric_limits<double>::min());
    r.max_scaled_curvature = std::max(r.max_scaled_curvature, d2 * m * m / scale);
  }
  r.is_in_D = std::abs(r.integral_under_mu - 1.0) <= kClassIntegralTol && r.min_f_prime > 0.0 &&
              r.max_scaled_curvature <= kClassCurvatureTol;
  return r;
}

}  // namespace

DensityClassReport density_class_check(const std::function<double(double)>& f) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  double integral = std::numeric_limits<double>::quiet_NaN();
  try {
    integral = integrator.integrate([&](double x) { return f(x) / x; }, 0.0, 1.0);
  } catch (const std::exception&) {
    // non-integrable against mu; leave NaN so the verdict fails
  }
  return shape_report(f, 1e-6, integral);
}

DensityClassReport density_class_check(const GridDensity& f) {
  const double lo = std::max(1e-6, 100.0 * f.grid().x_min());
  return shape_report([&](double x) { return f(x); }, lo, integrate_mu(f));
}

// ---------------------------------------------------------------------------
// Uniform / uniformly returning diagnostics

UniformityDeviation returning_uniform_check(const GridDensity& f, std::uint64_t n, CheckMode mode) {
  if (n < 2) throw DomainError("returning_uniform_check: need n >= 2");
  const auto report = density_class_check(f);
  if (!report.is_in_D) throw DomainError("returning_uniform_check: f is not in the density class D");

  const auto& grid = f.grid();
  std::vector<double> normalized(grid.size());
  if (mode == CheckMode::Returning) {
    const auto g = mu_transfer_power(f, n);
    const double b = std::log(static_cast<double>(n));
    for (std::size_t i = 0; i < grid.size(); ++i) normalized[i] = b * g.values()[i];
  } else {
    std::vector<double> sum(grid.size(), 0.0);
    GridDensity cur = f;
    for (std::uint64_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += cur.values()[i];
      if (k + 1 < n) cur = mu_transfer_apply(cur);
    }
    const double a = wandering_rate(n) / static_cast<double>(n);
    for (std::size_t i = 0; i < grid.size(); ++i) normalized[i] = a * sum[i];
  }

  UniformityDeviation d;
  d.sup_dev = -std::numeric_limits<double>::infinity();
  d.inf_dev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.node(i) <= 0.5) continue;
    const double dev = normalized[i] - 1.0;
    d.sup_dev = std::max(d.sup_dev, dev);
    d.inf_dev = std::min(d.inf_dev, dev);
  }
  d.max_abs_dev = std::max(std::abs(d.sup_dev), std::abs(d.inf_dev));
  return d;
}

// ---------------------------------------------------------------------------
// Operator evaluation of nu(Z_m <= k)

namespace {

// k < 0 means "no visit at all in [0, m]".
ZTail z_tail_signed(std::uint64_t m, std::int64_t k, const GridDensity& f, double delta,
                    std::uint64_t budget) {
  if (m > budget) {
    throw Refused("operator evaluation refused: m = " + std::to_string(m) + " exceeds budget " +
                  std::to_string(budget));
  }
  if (k > static_cast<std::int64_t>(m)) throw DomainError("z_tail: need k <= m");
  if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("z_tail: delta must lie in [0,1]");

  ZTail out;
  out.cut = static_cast<std::uint64_t>(std::floor(delta * static_cast<double>(m)));
  out.no_visit_part = integrate_mu(f, 0.0, 1.0 / (static_cast<double>(m) + 2.0));

  GridDensity cur = f;
  for (std::int64_t j = 0; j <= k; ++j) {
    const auto r = static_cast<double>(m - static_cast<std::uint64_t>(j));
    const double term = integrate_mu(cur, (r + 1.0) / (r + 2.0), 1.0);
    if (static_cast<std::uint64_t>(j) < out.cut) {
      out.i_part += term;
    } else {
      out.j_part += term;
    }
    if (j < k) cur = mu_transfer_apply(cur);
  }
  out.visit_part = out.i_part + out.j_part;
  out.value = std::clamp(out.no_visit_part + out.visit_part, 0.0, 1.0);
  return out;
}

}  // namespace

ZTail z_tail_via_operator(std::uint64_t m, std::uint64_t k, const GridDensity& f, double delta,
                          std::uint64_t budget) {
  if (k > m) throw DomainError("z_tail: need 0 <= k <= m");
  return z_tail_signed(m, static_cast<std::int64_t>(k), f, delta, budget);
}

ZTail joint_via_operator(const TailQuery& q, const GridDensity& f, double delta, std::uint64_t budget) {
  q.validate();
  if (q.kind != EventKind::Joint) throw DomainError("joint_via_operator: query must be JOINT");
  const Rational n(to_big(q.n));
  const BigInt upper = floor(Rational(n * (1 + q.y)));
  const Rational lower_bound = n * (1 - q.x);
  const BigInt lower_ceil = -floor(Rational(-lower_bound));
  const BigInt m = upper - 1;
  const BigInt k = lower_ceil - 2;
  if (!fits_u64(m)) throw Refused("joint_via_operator: n(1+y) too large");
  const std::int64_t ks = k < 0 ? -1 : static_cast<std::int64_t>(to_u64(k));
  return z_tail_signed(to_u64(m), ks, f, delta, budget);
}

}  // namespace cfld
