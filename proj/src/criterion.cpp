#include "hiermed/criterion.hpp"

#include <algorithm>

#include "hiermed/blup.hpp"

namespace hiermed {

namespace {

double pick(const Sym2& m, int a, int b) {
  if (a == 0 && b == 0) return m.m11;
  if (a == 1 && b == 1) return m.m22;
  return m.m12;
}

// v (N u + 1) / ((N u + 1)(N w v + 1) - N^2 w^2 u v) with the denominator
// expanded as N u + N w v + 1 + N^2 w (1 - w) u v. `treated` is N w and
// `controls` is N (1 - w).
double deviation_effect_mse(double total, double treated, double controls, double u, double v) {
  const double denom = total * u + treated * v + 1.0 + treated * controls * u * v;
  return v * (total * u + 1.0) / denom;
}

}  // namespace

double CompoundSymmetricMatrix::entry(int row, int col) const {
  const double k = dim;
  return (a - b) / k + (row == col ? b : 0.0);
}

double FullMseMatrix::entry(int row, int col) const {
  const double k = dim;
  const double pop = pick(population, row % 2, col % 2);
  const double dev = pick(deviation, row % 2, col % 2);
  const double same = (row / 2 == col / 2) ? 1.0 : 0.0;
  return pop / k + dev * (same - 1.0 / k);
}

double FullMseMatrix::trace() const {
  return effect_part().trace() + intercept_part().trace();
}

CompoundSymmetricMatrix FullMseMatrix::effect_part() const {
  return {population.m22, deviation.m22, dim};
}

CompoundSymmetricMatrix FullMseMatrix::intercept_part() const {
  return {population.m11, deviation.m11, dim};
}

FullMseMatrix mse_full(const ExactDesign& design, const VarianceRatios& ratios) {
  if (!ratios.invertible()) {
    throw SingularDispersion();
  }
  const Sym2 info = information_matrix_exact(design);
  const Sym2 prior{1.0 / ratios.intercept(), 0.0, 1.0 / ratios.effect()};
  return {info.inverse(), (info + prior).inverse(), design.dims().centers()};
}

CompoundSymmetricMatrix mse_alpha(const ModelDims& dims, const VarianceRatios& ratios,
                                  const ApproxDesign& design) {
  const double total = dims.per_center();
  const double w = design.rate();
  const double treated = total * w;
  const double controls = total * (1.0 - w);
  return {1.0 / (treated * (1.0 - w)),
          deviation_effect_mse(total, treated, controls, ratios.intercept(), ratios.effect()),
          dims.centers()};
}

CompoundSymmetricMatrix mse_alpha(const ExactDesign& design, const VarianceRatios& ratios) {
  const double total = design.dims().per_center();
  const double treated = design.treated();
  const double controls = design.controls();
  return {total / (treated * controls),
          deviation_effect_mse(total, treated, controls, ratios.intercept(), ratios.effect()),
          design.dims().centers()};
}

CriterionValue a_criterion(const ModelDims& dims, const VarianceRatios& ratios,
                           const ApproxDesign& design) {
  return {mse_alpha(dims, ratios, design).trace()};
}

CriterionValue a_criterion(const ExactDesign& design, const VarianceRatios& ratios) {
  return {mse_alpha(design, ratios).trace()};
}

double efficiency(const ModelDims& dims, const VarianceRatios& ratios, const ApproxDesign& reference,
                  const ApproxDesign& optimum) {
  // The optimum is only resolved to the search tolerance; a reference sitting
  // on the true minimum must still report exactly 1.
  const double ratio = a_criterion(dims, ratios, optimum).phi / a_criterion(dims, ratios, reference).phi;
  return std::min(ratio, 1.0);
}

}  // namespace hiermed
