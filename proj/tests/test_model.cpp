#include "doctest.h"

#include <cmath>

#include "hiermed/model.hpp"

using namespace hiermed;

TEST_CASE("exact information matrix counts ones in the design columns") {
  CHECK(information_matrix_exact(ExactDesign({1, 10}, 5)) == Sym2{10, 5, 5});
  CHECK(information_matrix_exact(ExactDesign({1, 2}, 1)) == Sym2{2, 1, 1});

  const Sym2 m = information_matrix_exact(ExactDesign({3, 10}, 7));
  CHECK(m == Sym2{10, 7, 7});
  CHECK(m.determinant() == doctest::Approx(21.0));
}

TEST_CASE("approximate information matrix interpolates the exact one") {
  CHECK(information_matrix_approx({1, 10}, ApproxDesign(0.5)) == Sym2{10, 5, 5});
  const Sym2 m = information_matrix_approx({1, 10}, ApproxDesign(0.3));
  CHECK(m.m11 == 10.0);
  CHECK(m.m12 == doctest::Approx(3.0));
  CHECK(m.m22 == doctest::Approx(3.0));
  CHECK(information_matrix_approx({1, 5}, ApproxDesign(0.5)) == Sym2{5, 2.5, 2.5});
}

TEST_CASE("determinant and inverse over all exact designs") {
  for (int big_n = 2; big_n <= 40; ++big_n) {
    for (int n = 1; n < big_n; ++n) {
      const ExactDesign design({4, big_n}, n);
      const Sym2 info = information_matrix_exact(design);
      CHECK(info.determinant() == doctest::Approx(static_cast<double>(n) * (big_n - n)));
      CHECK(info.inverse().m22 == doctest::Approx(static_cast<double>(big_n) / (n * (big_n - n))));

      const Sym2 approx = information_matrix_approx(design.dims(), design.as_approx());
      CHECK(approx.m11 == info.m11);
      CHECK(approx.m12 == doctest::Approx(info.m12).epsilon(1e-14));
      CHECK(approx.m22 == doctest::Approx(info.m22).epsilon(1e-14));
    }
  }
}

TEST_CASE("domain types reject invalid values") {
  CHECK_THROWS_AS(ModelDims(0, 10), InvalidArgument);
  CHECK_THROWS_AS(ModelDims(5, 1), InvalidArgument);
  CHECK_THROWS_AS(VarianceRatios(-0.1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(VarianceRatios(1.0, std::nan("")), InvalidArgument);
  CHECK_THROWS_AS(VarianceRatios(1.0, INFINITY), InvalidArgument);
  CHECK_NOTHROW(VarianceRatios(0.0, 0.0));
  CHECK_THROWS_AS(ApproxDesign(0.0), InvalidArgument);
  CHECK_THROWS_AS(ApproxDesign(1.0), InvalidArgument);
  CHECK_THROWS_AS(ApproxDesign(std::nan("")), InvalidArgument);
  CHECK_THROWS_AS(ExactDesign({1, 10}, 0), InvalidArgument);
  CHECK_THROWS_AS(ExactDesign({1, 10}, 10), InvalidArgument);
  CHECK_THROWS_AS((Sym2{1, 1, 1}.inverse()), InvalidArgument);
}
