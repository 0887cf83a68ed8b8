#pragma once

#include <cstdint>
#include <vector>

#include "hiermed/model.hpp"

namespace hiermed {

/// Simulation of the two-level model with Gaussian center effects and errors.
struct SimConfig {
  ExactDesign design{ModelDims{1, 2}, 1};
  VarianceRatios ratios{0.0, 0.0};
  double mean_intercept = 0.0;
  double mean_effect = 1.0;
  double sigma = 1.0;
  long replications = 1;
  std::uint64_t master_seed = 0;

  void validate() const;
};

/// Responses of one simulated trial. Columns 0..n-1 of each center are the
/// treatment group, n..N-1 the control group.
struct SimDataset {
  int centers = 0;
  int per_center = 0;
  int treated = 0;
  std::vector<double> responses;  ///< row-major K x N
  std::vector<double> true_intercepts;
  std::vector<double> true_effects;

  double y(int center, int subject) const {
    return responses[static_cast<std::size_t>(center) * per_center + subject];
  }
};

/// Seed of the independent random stream for one replicate.
std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t replicate_index);

/// Deterministic in (config.master_seed, replicate_index).
SimDataset simulate_trial(const SimConfig& config, std::uint64_t replicate_index);

/// Empirical mean and standard error of one per-replicate statistic.
struct McEstimate {
  double mean = 0.0;
  double standard_error = 0.0;  ///< infinite when only one replicate exists
};

/// Empirical versus analytic treatment-effect MSE, per sigma^2.
///
/// The trace splits along the two projectors of the compound-symmetric MSE
/// matrix: the averaging part K * mean(e)^2 estimates a, the centering part
/// sum (e_i - mean(e))^2 estimates (K - 1) b.
struct McReport {
  long replications = 0;
  McEstimate trace;
  double analytic_trace = 0.0;
  double relative_error = 0.0;
  McEstimate averaging_part;
  double analytic_averaging_part = 0.0;
  McEstimate centering_part;
  double analytic_centering_part = 0.0;

  /// |empirical - analytic| <= z standard errors for the trace and both parts.
  bool within(double z) const;
};

/// Runs the replications on up to `threads` workers; the report is
/// bit-identical for every thread count.
McReport empirical_mse(const SimConfig& config, unsigned threads = 1);

}  // namespace hiermed
