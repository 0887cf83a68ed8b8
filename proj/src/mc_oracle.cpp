#include "hiermed/mc_oracle.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "hiermed/blup.hpp"
#include "hiermed/criterion.hpp"
#include "hiermed/parallel.hpp"

namespace hiermed {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Sums in a fixed binary tree so the result depends only on the values.
double pairwise_sum(const double* first, std::size_t count) {
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += first[i];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(first, half) + pairwise_sum(first + half, count - half);
}

McEstimate summarize(const std::vector<double>& values) {
  const std::size_t count = values.size();
  McEstimate est;
  est.mean = pairwise_sum(values.data(), count) / static_cast<double>(count);
  if (count < 2) {
    est.standard_error = std::numeric_limits<double>::infinity();
    return est;
  }
  std::vector<double> sq(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double d = values[i] - est.mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq.data(), count) / static_cast<double>(count - 1);
  est.standard_error = std::sqrt(var / static_cast<double>(count));
  return est;
}

}  // namespace

void SimConfig::validate() const {
  if (replications < 1) {
    throw InvalidArgument("replications must be >= 1");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("residual standard deviation sigma must be finite and > 0");
  }
  if (!std::isfinite(mean_intercept) || !std::isfinite(mean_effect)) {
    throw InvalidArgument("population means must be finite");
  }
}

std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t replicate_index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(~replicate_index));
}

SimDataset simulate_trial(const SimConfig& config, std::uint64_t replicate_index) {
  config.validate();
  const ModelDims& dims = config.design.dims();
  SimDataset data;
  data.centers = dims.centers();
  data.per_center = dims.per_center();
  data.treated = config.design.treated();
  data.responses.resize(static_cast<std::size_t>(data.centers) * data.per_center);
  data.true_intercepts.resize(static_cast<std::size_t>(data.centers));
  data.true_effects.resize(static_cast<std::size_t>(data.centers));

  std::mt19937_64 rng(replicate_seed(config.master_seed, replicate_index));
  std::normal_distribution<double> standard(0.0, 1.0);
  const double sd_intercept = config.sigma * std::sqrt(config.ratios.intercept());
  const double sd_effect = config.sigma * std::sqrt(config.ratios.effect());

  for (int i = 0; i < data.centers; ++i) {
    const double mu = config.mean_intercept + sd_intercept * standard(rng);
    const double alpha = config.mean_effect + sd_effect * standard(rng);
    data.true_intercepts[static_cast<std::size_t>(i)] = mu;
    data.true_effects[static_cast<std::size_t>(i)] = alpha;
    double* row = data.responses.data() + static_cast<std::size_t>(i) * data.per_center;
    for (int j = 0; j < data.per_center; ++j) {
      const double mean = j < data.treated ? mu + alpha : mu;
      row[j] = mean + config.sigma * standard(rng);
    }
  }
  return data;
}

bool McReport::within(double z) const {
  const auto ok = [z](const McEstimate& e, double analytic) {
    return std::abs(e.mean - analytic) <= z * e.standard_error;
  };
  return ok(trace, analytic_trace) && ok(averaging_part, analytic_averaging_part) &&
         ok(centering_part, analytic_centering_part);
}

McReport empirical_mse(const SimConfig& config, unsigned threads) {
  config.validate();
  const ExactDesign& design = config.design;
  const BlupWeights weights = blup_weights(design, config.ratios);
  const int k = design.dims().centers();
  const int big_n = design.dims().per_center();
  const int n = design.treated();
  const double var = config.sigma * config.sigma;

  const auto reps = static_cast<std::size_t>(config.replications);
  std::vector<double> averaging(reps);
  std::vector<double> centering(reps);

  parallel_for(reps, threads, [&](std::size_t rep) {
    const SimDataset data = simulate_trial(config, rep);
    std::vector<double> yt(static_cast<std::size_t>(k));
    std::vector<double> yc(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      double st = 0.0;
      double sc = 0.0;
      for (int j = 0; j < n; ++j) st += data.y(i, j);
      for (int j = n; j < big_n; ++j) sc += data.y(i, j);
      yt[static_cast<std::size_t>(i)] = st / n;
      yc[static_cast<std::size_t>(i)] = sc / (big_n - n);
    }
    const CenterPredictions pred = predict_scalar(CenterSummaries(std::move(yt), std::move(yc)), weights);

    std::vector<double> err(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < err.size(); ++i) {
      err[i] = pred[i].effect - data.true_effects[i];
    }
    const double mean_err = pairwise_sum(err.data(), err.size()) / k;
    double centered = 0.0;
    for (double e : err) centered += (e - mean_err) * (e - mean_err);
    averaging[rep] = k * mean_err * mean_err / var;
    centering[rep] = centered / var;
  });

  std::vector<double> total(reps);
  for (std::size_t r = 0; r < reps; ++r) total[r] = averaging[r] + centering[r];

  const CompoundSymmetricMatrix analytic = mse_alpha(design, config.ratios);
  McReport report;
  report.replications = config.replications;
  report.trace = summarize(total);
  report.averaging_part = summarize(averaging);
  report.centering_part = summarize(centering);
  report.analytic_trace = analytic.trace();
  report.analytic_averaging_part = analytic.a;
  report.analytic_centering_part = (k - 1) * analytic.b;
  report.relative_error = std::abs(report.trace.mean - report.analytic_trace) / report.analytic_trace;
  return report;
}

}  // namespace hiermed
