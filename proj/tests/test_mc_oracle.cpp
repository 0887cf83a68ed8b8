#include "doctest.h"

#include <cmath>

#include "hiermed/criterion.hpp"
#include "hiermed/mc_oracle.hpp"

using namespace hiermed;

namespace {

SimConfig make_config(int k, int big_n, int n, double u, double v, long reps, std::uint64_t seed) {
  SimConfig c;
  c.design = ExactDesign({k, big_n}, n);
  c.ratios = VarianceRatios(u, v);
  c.replications = reps;
  c.master_seed = seed;
  return c;
}

}  // namespace

TEST_CASE("noise-free trial reproduces the population means") {
  SimConfig c = make_config(4, 6, 2, 0.0, 0.0, 1, 1);
  c.mean_intercept = 3.0;
  c.mean_effect = 1.5;
  c.sigma = 1e-12;
  const SimDataset d = simulate_trial(c, 0);
  for (int i = 0; i < 4; ++i) {
    CHECK(d.true_intercepts[i] == 3.0);
    CHECK(d.true_effects[i] == 1.5);
    for (int j = 0; j < 6; ++j) CHECK(d.y(i, j) == doctest::Approx(j < 2 ? 4.5 : 3.0).epsilon(1e-10));
  }
}

TEST_CASE("trials are deterministic per replicate") {
  const SimConfig c = make_config(5, 8, 3, 0.3, 0.6, 1, 42);
  const SimDataset a = simulate_trial(c, 7);
  const SimDataset b = simulate_trial(c, 7);
  CHECK(a.responses == b.responses);
  CHECK(a.true_effects == b.true_effects);
  CHECK(simulate_trial(c, 8).responses != a.responses);
  CHECK(replicate_seed(42, 0) != replicate_seed(43, 0));
  CHECK(replicate_seed(42, 0) != replicate_seed(42, 1));
}

TEST_CASE("drawn treatment effects have the configured variance") {
  SimConfig c = make_config(100000, 2, 1, 0.2, 0.5, 1, 9);
  c.sigma = 2.0;
  const SimDataset d = simulate_trial(c, 0);
  const double k = d.true_effects.size();
  double mean = 0.0;
  for (double a : d.true_effects) mean += a / k;
  double var = 0.0;
  for (double a : d.true_effects) var += (a - mean) * (a - mean) / (k - 1);
  const double target = 0.5 * 4.0;
  // Gaussian sample variance has standard error target * sqrt(2 / (k - 1)).
  CHECK(std::abs(var - target) <= 3.0 * target * std::sqrt(2.0 / (k - 1)));
  CHECK(mean == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("single center leaves only the population part") {
  const McReport r = empirical_mse(make_config(1, 10, 3, 0.4, 0.8, 20000, 5));
  CHECK(r.analytic_trace == doctest::Approx(10.0 / 21.0));
  CHECK(r.centering_part.mean == 0.0);
  CHECK(std::abs(r.trace.mean - r.analytic_trace) <= 3.0 * r.trace.standard_error);
}

TEST_CASE("homogeneous effects: every center shares one predicted effect") {
  const McReport r = empirical_mse(make_config(20, 10, 4, 0.5, 0.0, 20000, 6));
  CHECK(r.analytic_trace == doctest::Approx(10.0 / 24.0));
  CHECK(r.centering_part.mean < 1e-20);
  CHECK(std::abs(r.trace.mean - r.analytic_trace) <= 3.0 * r.trace.standard_error);
}

TEST_CASE("property: empirical MSE matches the analytic criterion on a grid") {
  std::uint64_t seed = 1000;
  for (int k : {1, 5, 50}) {
    for (int big_n : {4, 10}) {
      for (double u : {0.01, 0.25, 1.5}) {
        for (double v : {0.01, 0.5, 2.0}) {
          const McReport r = empirical_mse(make_config(k, big_n, big_n / 2, u, v, 10000, ++seed));
          CAPTURE(k);
          CAPTURE(big_n);
          CAPTURE(u);
          CAPTURE(v);
          CHECK(r.within(3.0));
          CHECK(r.trace.standard_error > 0.0);
        }
      }
    }
  }
}

TEST_CASE("normalized MSE does not depend on location and scale") {
  SimConfig base = make_config(10, 6, 3, 0.3, 0.9, 20000, 17);
  SimConfig shifted = base;
  shifted.mean_intercept = -40.0;
  shifted.mean_effect = 12.0;
  shifted.sigma = 3.5;
  const McReport a = empirical_mse(base);
  const McReport b = empirical_mse(shifted);
  // Same seed: the same standard normals drive both runs.
  CHECK(a.trace.mean == doctest::Approx(b.trace.mean).epsilon(1e-9));

  shifted.master_seed = 18;
  const McReport c = empirical_mse(shifted);
  const double se = std::hypot(a.trace.standard_error, c.trace.standard_error);
  CHECK(std::abs(a.trace.mean - c.trace.mean) <= 3.0 * se);
}

TEST_CASE("reports are bit-identical for any thread count") {
  const SimConfig c = make_config(12, 8, 5, 0.25, 1.0, 3001, 123);
  const McReport one = empirical_mse(c, 1);
  for (unsigned threads : {2u, 3u, 8u}) {
    const McReport many = empirical_mse(c, threads);
    CHECK(many.trace.mean == one.trace.mean);
    CHECK(many.trace.standard_error == one.trace.standard_error);
    CHECK(many.averaging_part.mean == one.averaging_part.mean);
    CHECK(many.centering_part.mean == one.centering_part.mean);
  }
}

TEST_CASE("one replication is legal and has an undefined standard error") {
  const McReport r = empirical_mse(make_config(5, 10, 5, 0.25, 0.5, 1, 3));
  CHECK(r.replications == 1);
  CHECK(std::isinf(r.trace.standard_error));
  CHECK(r.trace.mean > 0.0);
}

TEST_CASE("invalid simulation settings are rejected") {
  SimConfig c = make_config(5, 10, 5, 0.25, 0.5, 0, 3);
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.replications = 10;
  c.sigma = 0.0;
  CHECK_THROWS_AS(empirical_mse(c), InvalidArgument);
}
