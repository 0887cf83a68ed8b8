#pragma once

#include <stdexcept>

namespace hiermed {

/// Thrown when a value violates the invariant of a domain type.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Number of centers K and subjects per center N.
class ModelDims {
 public:
  ModelDims(int centers, int per_center);

  int centers() const { return centers_; }
  int per_center() const { return per_center_; }

  friend bool operator==(const ModelDims&, const ModelDims&) = default;

 private:
  int centers_;
  int per_center_;
};

/// Between-center variance of the intercepts (u) and of the treatment
/// effects (v), both relative to the residual variance.  Zero is admitted
/// as the limit of homogeneous centers.
class VarianceRatios {
 public:
  VarianceRatios(double intercept, double effect);

  double intercept() const { return intercept_; }
  double effect() const { return effect_; }

  /// True when the dispersion diag(u, v) can be inverted.
  bool invertible() const { return intercept_ > 0.0 && effect_ > 0.0; }

 private:
  double intercept_;
  double effect_;
};

/// Continuous allocation rate w in (0, 1) to the treatment group.
class ApproxDesign {
 public:
  explicit ApproxDesign(double rate);

  double rate() const { return rate_; }

 private:
  double rate_;
};

/// Integer treatment group size n in 1..N-1, identical in every center.
class ExactDesign {
 public:
  ExactDesign(ModelDims dims, int treated);

  const ModelDims& dims() const { return dims_; }
  int treated() const { return treated_; }
  int controls() const { return dims_.per_center() - treated_; }
  ApproxDesign as_approx() const;

 private:
  ModelDims dims_;
  int treated_;
};

/// Symmetric 2x2 matrix [[m11, m12], [m12, m22]].
struct Sym2 {
  double m11 = 0.0;
  double m12 = 0.0;
  double m22 = 0.0;

  double determinant() const { return m11 * m22 - m12 * m12; }
  /// Cofactor inverse; throws InvalidArgument when singular.
  Sym2 inverse() const;

  friend Sym2 operator+(const Sym2& a, const Sym2& b) {
    return {a.m11 + b.m11, a.m12 + b.m12, a.m22 + b.m22};
  }
  friend bool operator==(const Sym2&, const Sym2&) = default;
};

/// F^T F of the within-center design, in units of observation counts.
using MomentMatrix2 = Sym2;

/// [[N, n], [n, n]].
MomentMatrix2 information_matrix_exact(const ExactDesign& design);

/// N * [[1, w], [w, w]]; the continuous extension n = N w.
MomentMatrix2 information_matrix_approx(const ModelDims& dims, const ApproxDesign& design);

}  // namespace hiermed
