#pragma once

#include <cstddef>

#include "hiermed/model.hpp"

namespace hiermed {

/// K x K matrix a (1/K) J + b (I - (1/K) J), stored as (a, b, K).
///
/// The two projectors are orthogonal, so the eigenvalues are a (once, along
/// the all-ones direction) and b (K - 1 times, on its complement).
struct CompoundSymmetricMatrix {
  double a = 0.0;
  double b = 0.0;
  int dim = 1;

  double trace() const { return a + (dim - 1) * b; }
  double entry(int row, int col) const;
};

/// MSE matrix of the stacked BLUP (mu_1, alpha_1, ..., mu_K, alpha_K):
///
///   (1/K) J (x) population + (I - (1/K) J) (x) deviation
///
/// with population = (F'F)^-1 and deviation = (F'F + D^-1)^-1, per sigma^2.
struct FullMseMatrix {
  Sym2 population;
  Sym2 deviation;
  int dim = 1;

  /// Entry of the 2K x 2K matrix; index 2i is mu_i, 2i + 1 is alpha_i.
  double entry(int row, int col) const;
  double trace() const;
  /// Restriction to the treatment effects (I_K (x) (0, 1)).
  CompoundSymmetricMatrix effect_part() const;
  /// Restriction to the intercepts (I_K (x) (1, 0)).
  CompoundSymmetricMatrix intercept_part() const;
};

/// A-criterion value in units of sigma^2.
struct CriterionValue {
  double phi = 0.0;
};

/// Requires u, v > 0; throws SingularDispersion otherwise.
FullMseMatrix mse_full(const ExactDesign& design, const VarianceRatios& ratios);

/// Treatment-effect MSE matrix for an approximate design; continuous at u = 0
/// and v = 0.
CompoundSymmetricMatrix mse_alpha(const ModelDims& dims, const VarianceRatios& ratios,
                                  const ApproxDesign& design);

/// Same matrix at w = n/N, evaluated in integer form: the population part
/// N / (n (N - n)) is then exactly symmetric under n <-> N - n.
CompoundSymmetricMatrix mse_alpha(const ExactDesign& design, const VarianceRatios& ratios);

CriterionValue a_criterion(const ModelDims& dims, const VarianceRatios& ratios,
                           const ApproxDesign& design);
CriterionValue a_criterion(const ExactDesign& design, const VarianceRatios& ratios);

/// Phi(w_opt) / Phi(w_ref).
double efficiency(const ModelDims& dims, const VarianceRatios& ratios, const ApproxDesign& reference,
                  const ApproxDesign& optimum);

}  // namespace hiermed
