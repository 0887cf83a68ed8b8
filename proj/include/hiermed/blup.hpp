#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "hiermed/model.hpp"

namespace hiermed {

/// Thrown by the matrix-form predictor when u = 0 or v = 0.
class SingularDispersion : public std::domain_error {
 public:
  SingularDispersion();
};

/// Shrinkage coefficients of the scalar BLUP forms.
///
///   mu_i    = c0 (Y_iT - Y..T) + c Y_iC + (1 - c) Y..C
///   alpha_i = c1 Y_iT + (1 - c1) Y..T - (1 - c2) Y_iC - c2 Y..C
///
/// `delta` is the common denominator (Nu + 1)(nv + 1) - n^2 uv, kept in the
/// expanded form n u v (N - n) + N u + n v + 1 so it stays positive and free of
/// cancellation for large ratios.
struct BlupWeights {
  double c0 = 0.0;
  double c = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double delta = 1.0;
};

BlupWeights blup_weights(const ExactDesign& design, const VarianceRatios& ratios);

/// (intercept, treatment effect) pair for one center or for the population.
struct CenterParams {
  double intercept = 0.0;
  double effect = 0.0;
};

/// Per-center treatment and control group means.
class CenterSummaries {
 public:
  CenterSummaries(std::vector<double> treatment_means, std::vector<double> control_means);

  std::size_t centers() const { return treatment_.size(); }
  std::span<const double> treatment_means() const { return treatment_; }
  std::span<const double> control_means() const { return control_; }
  double overall_treatment() const { return overall_treatment_; }
  double overall_control() const { return overall_control_; }

 private:
  std::vector<double> treatment_;
  std::vector<double> control_;
  double overall_treatment_ = 0.0;
  double overall_control_ = 0.0;
};

using CenterPredictions = std::vector<CenterParams>;

/// Within-center least squares: (Y_iC, Y_iT - Y_iC).
std::vector<CenterParams> individual_estimates(const CenterSummaries& summaries);

/// Population BLUE: (Y..C, Y..T - Y..C).
CenterParams population_blue(const CenterSummaries& summaries);

/// BLUPs through the closed-form weights. Valid for u, v >= 0.
CenterPredictions predict_scalar(const CenterSummaries& summaries, const BlupWeights& weights);

/// BLUPs through (F'F + D^-1)^-1 (F'F b_ind + D^-1 b_pop), solved per center
/// with a cofactor inverse. Throws SingularDispersion unless u, v > 0.
CenterPredictions predict_matrix(const CenterSummaries& summaries, const ExactDesign& design,
                                 const VarianceRatios& ratios);

}  // namespace hiermed
