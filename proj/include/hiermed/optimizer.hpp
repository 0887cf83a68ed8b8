#pragma once

#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "hiermed/criterion.hpp"
#include "hiermed/model.hpp"

namespace hiermed {

inline constexpr double kDefaultTolerance = 1e-8;
/// Search bracket is [kBoundaryOffset, 1 - kBoundaryOffset].
inline constexpr double kBoundaryOffset = 1e-6;
inline constexpr double kBalancedRate = 0.5;

struct Optimum {
  double w_star = kBalancedRate;
  double phi_star = 0.0;
  int iterations = 0;
  double bracket_width = 0.0;
};

/// Golden-section minimization of a unimodal function on [lo, hi]; stops when
/// the bracket is no wider than `tol` and reports its midpoint.
template <class Fn>
Optimum golden_section_minimize(const Fn& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  int iterations = 0;
  while (hi - lo > tol) {
    ++iterations;
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  const double mid = 0.5 * (lo + hi);
  return {mid, f(mid), iterations, hi - lo};
}

/// Minimizes the A-criterion over the allocation rate. `tol` must lie in
/// (1e-12, 1e-2).
Optimum optimize_allocation(const ModelDims& dims, const VarianceRatios& ratios,
                            double tol = kDefaultTolerance);

struct ExactOptimum {
  ExactDesign design;
  CriterionValue value;
  /// The other design adjacent to w*, when it differs from `design`.
  std::optional<ExactDesign> runner_up;
  std::optional<CriterionValue> runner_up_value;
};

/// Best of the two exact designs adjacent to N w*; ties go to the smaller n.
ExactOptimum optimal_exact(const ModelDims& dims, const VarianceRatios& ratios);

/// Exhaustive scan over n = 1..N-1 with the same tie rule. N <= 10^6.
ExactOptimum brute_force_exact(const ModelDims& dims, const VarianceRatios& ratios);

/// r = x / (1 + x), mapping [0, inf) onto [0, 1).
inline double rescale_ratio(double x) { return x / (1.0 + x); }
/// x = r / (1 - r).
inline double unrescale_ratio(double r) { return r / (1.0 - r); }

enum class SweepAxis {
  kEffect,     ///< v varies, u fixed
  kIntercept,  ///< u varies, v fixed
  kQuotient,   ///< q = v/u varies, with u (or v) fixed
};

std::string_view axis_name(SweepAxis axis);
/// Accepts "v", "u" or "q"; throws InvalidArgument otherwise.
SweepAxis parse_axis(std::string_view name);

/// Which ratio a q-sweep holds fixed.
enum class QuotientHeld { kIntercept, kEffect };

struct SweepSpec {
  SweepAxis axis = SweepAxis::kEffect;
  QuotientHeld quotient_held = QuotientHeld::kIntercept;
  std::vector<double> fixed_values;
  /// Strictly increasing, inside (0, 1).
  std::vector<double> grid;
  ModelDims dims{1, 2};
  double tol = kDefaultTolerance;

  void validate() const;
};

struct SweepRow {
  SweepAxis axis = SweepAxis::kEffect;
  double r = 0.0;
  double ratio = 0.0;
  double u = 0.0;
  double v = 0.0;
  double w_star = kBalancedRate;
  double phi_star = 0.0;
  double phi_balanced = 0.0;
  double efficiency = 1.0;
};

/// m points r_i = (i + 1/2) / m.
std::vector<double> midpoint_grid(int points);

/// Variance ratios of one sweep point.
VarianceRatios sweep_ratios(const SweepSpec& spec, double fixed, double r);

/// One block of rows per fixed value, each in grid order. Rows are computed
/// on up to `threads` workers; the result does not depend on the count.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned threads = 1);

}  // namespace hiermed
