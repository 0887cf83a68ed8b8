#include "hiermed/model.hpp"

#include <cmath>
#include <string>

namespace hiermed {

ModelDims::ModelDims(int centers, int per_center) : centers_(centers), per_center_(per_center) {
  if (centers < 1) {
    throw InvalidArgument("number of centers K must be >= 1, got " + std::to_string(centers));
  }
  if (per_center < 2) {
    throw InvalidArgument("subjects per center N must be >= 2, got " + std::to_string(per_center));
  }
}

VarianceRatios::VarianceRatios(double intercept, double effect)
    : intercept_(intercept), effect_(effect) {
  if (!std::isfinite(intercept) || intercept < 0.0) {
    throw InvalidArgument("intercept variance ratio u must be finite and >= 0");
  }
  if (!std::isfinite(effect) || effect < 0.0) {
    throw InvalidArgument("treatment-effect variance ratio v must be finite and >= 0");
  }
}

ApproxDesign::ApproxDesign(double rate) : rate_(rate) {
  // Also rejects NaN.
  if (!(rate > 0.0 && rate < 1.0)) {
    throw InvalidArgument("allocation rate w must lie in the open interval (0, 1)");
  }
}

ExactDesign::ExactDesign(ModelDims dims, int treated) : dims_(dims), treated_(treated) {
  if (treated < 1 || treated > dims.per_center() - 1) {
    throw InvalidArgument("treatment group size n must lie in 1..N-1 (N=" +
                          std::to_string(dims.per_center()) + "), got " + std::to_string(treated));
  }
}

ApproxDesign ExactDesign::as_approx() const {
  return ApproxDesign(static_cast<double>(treated_) / dims_.per_center());
}

Sym2 Sym2::inverse() const {
  const double det = determinant();
  if (!(det != 0.0) || !std::isfinite(det)) {
    throw InvalidArgument("2x2 matrix is singular");
  }
  return {m22 / det, -m12 / det, m11 / det};
}

MomentMatrix2 information_matrix_exact(const ExactDesign& design) {
  const double total = design.dims().per_center();
  const double treated = design.treated();
  return {total, treated, treated};
}

MomentMatrix2 information_matrix_approx(const ModelDims& dims, const ApproxDesign& design) {
  const double total = dims.per_center();
  const double treated = total * design.rate();
  return {total, treated, treated};
}

}  // namespace hiermed
