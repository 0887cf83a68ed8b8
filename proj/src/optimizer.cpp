#include "hiermed/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hiermed/parallel.hpp"

namespace hiermed {

Optimum optimize_allocation(const ModelDims& dims, const VarianceRatios& ratios, double tol) {
  if (!(tol > 1e-12 && tol < 1e-2)) {
    throw InvalidArgument("optimizer tolerance must lie in (1e-12, 1e-2)");
  }
  const auto phi = [&](double w) { return a_criterion(dims, ratios, ApproxDesign(w)).phi; };
  return golden_section_minimize(phi, kBoundaryOffset, 1.0 - kBoundaryOffset, tol);
}

ExactOptimum optimal_exact(const ModelDims& dims, const VarianceRatios& ratios) {
  const int big_n = dims.per_center();
  const double scaled = big_n * optimize_allocation(dims, ratios).w_star;
  const int lower = std::clamp(static_cast<int>(std::floor(scaled)), 1, big_n - 1);
  const int upper = std::clamp(static_cast<int>(std::ceil(scaled)), 1, big_n - 1);

  const ExactDesign low_design(dims, lower);
  const CriterionValue low_value = a_criterion(low_design, ratios);
  if (upper == lower) {
    return {low_design, low_value, std::nullopt, std::nullopt};
  }
  const ExactDesign high_design(dims, upper);
  const CriterionValue high_value = a_criterion(high_design, ratios);
  if (high_value.phi < low_value.phi) {
    return {high_design, high_value, low_design, low_value};
  }
  return {low_design, low_value, high_design, high_value};
}

ExactOptimum brute_force_exact(const ModelDims& dims, const VarianceRatios& ratios) {
  if (dims.per_center() > 1'000'000) {
    throw InvalidArgument("brute-force exact search is limited to N <= 10^6");
  }
  ExactDesign best(dims, 1);
  CriterionValue best_value = a_criterion(best, ratios);
  for (int n = 2; n < dims.per_center(); ++n) {
    const ExactDesign candidate(dims, n);
    const CriterionValue value = a_criterion(candidate, ratios);
    if (value.phi < best_value.phi) {
      best = candidate;
      best_value = value;
    }
  }
  return {best, best_value, std::nullopt, std::nullopt};
}

std::string_view axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kEffect:
      return "v";
    case SweepAxis::kIntercept:
      return "u";
    case SweepAxis::kQuotient:
      return "q";
  }
  return "?";
}

SweepAxis parse_axis(std::string_view name) {
  if (name == "v") return SweepAxis::kEffect;
  if (name == "u") return SweepAxis::kIntercept;
  if (name == "q") return SweepAxis::kQuotient;
  throw InvalidArgument("sweep axis must be one of v, u, q; got '" + std::string(name) + "'");
}

void SweepSpec::validate() const {
  if (grid.empty()) {
    throw InvalidArgument("sweep grid must contain at least one point");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] < 1.0)) {
      throw InvalidArgument("sweep grid points must lie in the open interval (0, 1)");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw InvalidArgument("sweep grid must be strictly increasing");
    }
  }
  if (fixed_values.empty()) {
    throw InvalidArgument("sweep needs at least one fixed value");
  }
  for (double f : fixed_values) {
    if (!std::isfinite(f) || f < 0.0) {
      throw InvalidArgument("fixed variance ratios must be finite and >= 0");
    }
  }
  if (!(tol > 1e-12 && tol < 1e-2)) {
    throw InvalidArgument("optimizer tolerance must lie in (1e-12, 1e-2)");
  }
}

std::vector<double> midpoint_grid(int points) {
  if (points < 1) {
    throw InvalidArgument("grid size must be >= 1");
  }
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] = (i + 0.5) / points;
  }
  return grid;
}

VarianceRatios sweep_ratios(const SweepSpec& spec, double fixed, double r) {
  const double x = unrescale_ratio(r);
  switch (spec.axis) {
    case SweepAxis::kEffect:
      return {fixed, x};
    case SweepAxis::kIntercept:
      return {x, fixed};
    case SweepAxis::kQuotient:
      if (spec.quotient_held == QuotientHeld::kIntercept) return {fixed, x * fixed};
      return {fixed / x, fixed};
  }
  throw InvalidArgument("unknown sweep axis");
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned threads) {
  spec.validate();
  const std::size_t per_block = spec.grid.size();
  std::vector<SweepRow> rows(spec.fixed_values.size() * per_block);
  const ApproxDesign balanced(kBalancedRate);

  parallel_for(rows.size(), threads, [&](std::size_t idx) {
    const double fixed = spec.fixed_values[idx / per_block];
    const double r = spec.grid[idx % per_block];
    const VarianceRatios ratios = sweep_ratios(spec, fixed, r);
    const Optimum opt = optimize_allocation(spec.dims, ratios, spec.tol);

    SweepRow& row = rows[idx];
    row.axis = spec.axis;
    row.r = r;
    row.ratio = unrescale_ratio(r);
    row.u = ratios.intercept();
    row.v = ratios.effect();
    row.w_star = opt.w_star;
    row.phi_star = opt.phi_star;
    row.phi_balanced = a_criterion(spec.dims, ratios, balanced).phi;
    row.efficiency = efficiency(spec.dims, ratios, balanced, ApproxDesign(opt.w_star));
  });
  return rows;
}

}  // namespace hiermed
