#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "cfld/tail_query.hpp"

namespace cfld {

struct GridSpec {
  double x_min = 1e-8;
  std::size_t nodes = 4096;
};

// Log-spaced nodes x_i = x_min * exp(i h) on [x_min, 1], plus the
// interpolation stencils for the two inverse Farey branches evaluated at
// every node (they are reused by each operator application).
class LogGrid {
 public:
  struct Stencil {
    std::uint32_t start = 0;
    std::array<double, 4> cubic{};  // Lagrange weights on nodes start..start+3
    std::uint32_t left = 0;         // linear fallback: nodes left, left + 1
    double frac = 0.0;
    bool below = false;             // point lies below x_min
    double offset = 0.0;            // (log x - log x_min) / h
  };

  explicit LogGrid(GridSpec spec = {});

  std::size_t size() const noexcept { return x_.size(); }
  double node(std::size_t i) const noexcept { return x_[i]; }
  std::span<const double> nodes() const noexcept { return x_; }
  double step() const noexcept { return h_; }
  double log_min() const noexcept { return t0_; }
  double x_min() const noexcept { return x_.front(); }

  Stencil stencil(double x) const;
  const Stencil& left_branch(std::size_t i) const noexcept { return left_[i]; }
  const Stencil& right_branch(std::size_t i) const noexcept { return right_[i]; }

 private:
  double t0_;
  double h_;
  std::vector<double> x_;
  std::vector<Stencil> left_;   // at u0(x_i) = x_i / (1 + x_i)
  std::vector<Stencil> right_;  // at u1(x_i) = 1 / (1 + x_i)
};

std::shared_ptr<const LogGrid> make_grid(GridSpec spec = {});

// Function sampled on a LogGrid. Strictly positive data are interpolated by
// cubic Lagrange polynomials in (log x, log value) and extended below x_min
// as the power law through the first two nodes; data with zeros or negative
// entries fall back to linear interpolation in log x with constant clamping
// below x_min. Power functions c x^b are reproduced exactly in the first mode.
class GridDensity {
 public:
  GridDensity(std::shared_ptr<const LogGrid> grid, std::vector<double> values);
  static GridDensity from_function(std::shared_ptr<const LogGrid> grid,
                                   const std::function<double(double)>& f);

  double operator()(double x) const;
  double at(const LogGrid::Stencil& s) const;

  const LogGrid& grid() const noexcept { return *grid_; }
  const std::shared_ptr<const LogGrid>& grid_ptr() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  bool log_mode() const noexcept { return log_mode_; }

 private:
  std::shared_ptr<const LogGrid> grid_;
  std::vector<double> values_;
  std::vector<double> logs_;  // log of values in log mode
  bool log_mode_ = false;
};

// Integral over (0, 1] against Lebesgue measure: fourth-order Gregory rule in
// t = log x on the grid plus the exact integral of the extension below x_min.
double integrate_lebesgue(const GridDensity& g);
// Same against mu (density 1/x).
double integrate_mu(const GridDensity& f);
// Integral of f over [a, b] against mu, 0 <= a < b <= 1, by Gauss-Legendre
// panels in log x on the interpolant.
double integrate_mu(const GridDensity& f, double a, double b);

// (L g)(x) = [g(x/(1+x)) + g(1/(1+x))] / (1+x)^2, the Lebesgue-dual of g -> g o T.
GridDensity lebesgue_transfer_apply(const GridDensity& g);

// T^ f = (1/h) L (h f) with h(x) = 1/x, the mu-transfer operator.
GridDensity mu_transfer_apply(const GridDensity& f);
GridDensity mu_transfer_power(const GridDensity& f, std::uint64_t n);

struct DensityClassReport {
  bool is_in_D = false;
  double integral_under_mu = 0.0;
  double min_f_prime = 0.0;
  double max_f_double_prime = 0.0;
  // Largest f''(x) x^2 / |f(x)| seen; the curvature verdict uses this scale-free value.
  double max_scaled_curvature = 0.0;
};

inline constexpr double kClassIntegralTol = 1e-6;
inline constexpr double kClassCurvatureTol = 1e-6;

// Checks that f is a mu-probability density (integral 1 within
// kClassIntegralTol) with f' > 0 and f'' <= 0 on a log-spaced check grid.
DensityClassReport density_class_check(const std::function<double(double)>& f);
DensityClassReport density_class_check(const GridDensity& f);

enum class CheckMode { Returning, Uniform };

struct UniformityDeviation {
  double sup_dev = 0.0;      // max of (normalized value - 1) over grid nodes in K1
  double inf_dev = 0.0;      // min of the same
  double max_abs_dev = 0.0;  // max |normalized value - 1|
};

// RETURNING: log(n) T^n f against 1 on K1.
// UNIFORM:   (W_n / n) sum_{k<n} T^k f against 1 on K1, W_n = log(n + 2).
// Throws DomainError if f is not in the class D or n < 2.
UniformityDeviation returning_uniform_check(const GridDensity& f, std::uint64_t n, CheckMode mode);

struct ZTail {
  double value = 0.0;          // nu(Z_m <= k), visits and non-visits together
  double visit_part = 0.0;     // sum_{j<=k} int_{K1} 1{phi > m - j} T^j f dmu
  double no_visit_part = 0.0;  // nu(no visit to K1 in [0, m]) = nu((0, 1/(m+2)])
  double i_part = 0.0;         // visit terms j < cut
  double j_part = 0.0;         // visit terms j >= cut
  std::uint64_t cut = 0;
};

inline constexpr std::uint64_t kDefaultOperatorBudget = 20'000;

// nu(Z_m <= k) for dnu = f dmu. The visit sum uses
// K1 ∩ {phi > r} = [(r+1)/(r+2), 1]; the I/J split is taken at cut = floor(delta m).
ZTail z_tail_via_operator(std::uint64_t m, std::uint64_t k, const GridDensity& f, double delta = 0.1,
                          std::uint64_t budget = kDefaultOperatorBudget);

// nu of the JOINT event at the query's n, through the pathwise identities
// {JOINT} = {Z_M <= K} with M = floor(n(1+y)) - 1 and K = ceil(n(1-x)) - 2.
ZTail joint_via_operator(const TailQuery& q, const GridDensity& f, double delta = 0.1,
                         std::uint64_t budget = kDefaultOperatorBudget);

}  // namespace cfld
