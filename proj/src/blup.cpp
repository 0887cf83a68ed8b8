#include "hiermed/blup.hpp"

#include <numeric>

namespace hiermed {

SingularDispersion::SingularDispersion()
    : std::domain_error("dispersion diag(u, v) is singular; matrix-form BLUP needs u > 0 and v > 0") {}

BlupWeights blup_weights(const ExactDesign& design, const VarianceRatios& ratios) {
  const double big_n = design.dims().per_center();
  const double n = design.treated();
  const double u = ratios.intercept();
  const double v = ratios.effect();

  BlupWeights w;
  w.delta = n * u * v * (big_n - n) + big_n * u + n * v + 1.0;
  w.c0 = n * u / w.delta;
  w.c = u * (big_n - n) * (n * v + 1.0) / w.delta;
  w.c1 = n * v * (big_n * u - n * u + 1.0) / w.delta;
  w.c2 = (big_n * u + n * v + 1.0) / w.delta;
  return w;
}

CenterSummaries::CenterSummaries(std::vector<double> treatment_means, std::vector<double> control_means)
    : treatment_(std::move(treatment_means)), control_(std::move(control_means)) {
  if (treatment_.empty()) {
    throw InvalidArgument("at least one center is required");
  }
  if (treatment_.size() != control_.size()) {
    throw InvalidArgument("treatment and control means must have one entry per center");
  }
  const double k = static_cast<double>(treatment_.size());
  overall_treatment_ = std::accumulate(treatment_.begin(), treatment_.end(), 0.0) / k;
  overall_control_ = std::accumulate(control_.begin(), control_.end(), 0.0) / k;
}

std::vector<CenterParams> individual_estimates(const CenterSummaries& summaries) {
  const auto yt = summaries.treatment_means();
  const auto yc = summaries.control_means();
  std::vector<CenterParams> out(summaries.centers());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = {yc[i], yt[i] - yc[i]};
  }
  return out;
}

CenterParams population_blue(const CenterSummaries& summaries) {
  return {summaries.overall_control(), summaries.overall_treatment() - summaries.overall_control()};
}

CenterPredictions predict_scalar(const CenterSummaries& summaries, const BlupWeights& weights) {
  const auto yt = summaries.treatment_means();
  const auto yc = summaries.control_means();
  const double mean_t = summaries.overall_treatment();
  const double mean_c = summaries.overall_control();
  const auto& [c0, c, c1, c2, delta] = weights;

  CenterPredictions out(summaries.centers());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].intercept = c0 * (yt[i] - mean_t) + c * yc[i] + (1.0 - c) * mean_c;
    out[i].effect = c1 * yt[i] + (1.0 - c1) * mean_t - (1.0 - c2) * yc[i] - c2 * mean_c;
  }
  return out;
}

CenterPredictions predict_matrix(const CenterSummaries& summaries, const ExactDesign& design,
                                 const VarianceRatios& ratios) {
  if (!ratios.invertible()) {
    throw SingularDispersion();
  }
  const Sym2 info = information_matrix_exact(design);
  const Sym2 prior{1.0 / ratios.intercept(), 0.0, 1.0 / ratios.effect()};
  const Sym2 solve = (info + prior).inverse();

  const CenterParams pop = population_blue(summaries);
  const double prior_mu = prior.m11 * pop.intercept;
  const double prior_alpha = prior.m22 * pop.effect;

  const auto individual = individual_estimates(summaries);
  CenterPredictions out(individual.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& b = individual[i];
    const double rhs1 = info.m11 * b.intercept + info.m12 * b.effect + prior_mu;
    const double rhs2 = info.m12 * b.intercept + info.m22 * b.effect + prior_alpha;
    out[i].intercept = solve.m11 * rhs1 + solve.m12 * rhs2;
    out[i].effect = solve.m12 * rhs1 + solve.m22 * rhs2;
  }
  return out;
}

}  // namespace hiermed
