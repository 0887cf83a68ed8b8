#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "hiermed/blup.hpp"
#include "hiermed/criterion.hpp"
#include "hiermed/mc_oracle.hpp"
#include "hiermed/optimizer.hpp"

namespace hiermed::cli {

namespace {

using Json = nlohmann::ordered_json;

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { kDefault, kText, kJson, kCsv };

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.12g}", x);
}

std::string scalar_text(const Json& value) {
  if (value.is_number_float()) return num(value.get<double>());
  if (value.is_null()) return "inf";
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

// JSON has no infinity; an undefined standard error is written as null.
Json json_number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

// One flat record: `key = value` lines, a JSON object, or a two-line CSV.
void write_record(std::ostream& os, const Json& record, Format format) {
  switch (format) {
    case Format::kJson:
      os << record.dump(2) << '\n';
      return;
    case Format::kCsv: {
      std::string header;
      std::string values;
      for (const auto& [key, value] : record.items()) {
        header += (header.empty() ? "" : ",") + key;
        values += (values.empty() ? "" : ",") + scalar_text(value);
      }
      os << header << '\n' << values << '\n';
      return;
    }
    default:
      for (const auto& [key, value] : record.items()) {
        os << key << " = " << scalar_text(value) << '\n';
      }
  }
}

struct Point {
  int k = 0;
  int n_total = 0;
  double u = 0.0;
  double v = 0.0;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--K", k, "number of centers")->required();
    cmd.add_option("--N", n_total, "subjects per center")->required();
    cmd.add_option("--u", u, "intercept variance ratio")->required();
    cmd.add_option("--v", v, "treatment-effect variance ratio")->required();
  }
  ModelDims dims() const { return {k, n_total}; }
  VarianceRatios ratios() const { return {u, v}; }
};

Json optimize_record(const Point& p, double tol, bool exact) {
  const ModelDims dims = p.dims();
  const VarianceRatios ratios = p.ratios();
  const Optimum opt = optimize_allocation(dims, ratios, tol);
  Json rec;
  rec["K"] = dims.centers();
  rec["N"] = dims.per_center();
  rec["u"] = ratios.intercept();
  rec["v"] = ratios.effect();
  rec["w_star"] = opt.w_star;
  rec["phi_star"] = opt.phi_star;
  rec["iterations"] = opt.iterations;
  rec["bracket_width"] = opt.bracket_width;
  if (exact) {
    const ExactOptimum ex = optimal_exact(dims, ratios);
    rec["n_star"] = ex.design.treated();
    rec["phi_exact"] = ex.value.phi;
    if (ex.runner_up) {
      rec["runner_up_n"] = ex.runner_up->treated();
      rec["runner_up_phi"] = ex.runner_up_value->phi;
    }
  }
  return rec;
}

Json criterion_record(const Point& p, std::optional<double> rate, std::optional<int> treated) {
  const ModelDims dims = p.dims();
  const VarianceRatios ratios = p.ratios();
  CompoundSymmetricMatrix mse;
  double w = 0.0;
  if (treated) {
    const ExactDesign design(dims, *treated);
    mse = mse_alpha(design, ratios);
    w = design.as_approx().rate();
  } else {
    const ApproxDesign design(*rate);
    mse = mse_alpha(dims, ratios, design);
    w = design.rate();
  }
  Json rec;
  rec["K"] = dims.centers();
  rec["N"] = dims.per_center();
  rec["u"] = ratios.intercept();
  rec["v"] = ratios.effect();
  rec["w"] = w;
  if (treated) rec["n"] = *treated;
  rec["a"] = mse.a;
  rec["b"] = mse.b;
  rec["phi"] = mse.trace();
  return rec;
}

Json efficiency_record(const Point& p, double reference, double tol) {
  const ModelDims dims = p.dims();
  const VarianceRatios ratios = p.ratios();
  const ApproxDesign ref(reference);
  const Optimum opt = optimize_allocation(dims, ratios, tol);
  const double eff = efficiency(dims, ratios, ref, ApproxDesign(opt.w_star));
  Json rec;
  rec["K"] = dims.centers();
  rec["N"] = dims.per_center();
  rec["u"] = ratios.intercept();
  rec["v"] = ratios.effect();
  rec["w_ref"] = ref.rate();
  rec["phi_ref"] = a_criterion(dims, ratios, ref).phi;
  rec["w_star"] = opt.w_star;
  rec["phi_star"] = opt.phi_star;
  rec["efficiency"] = eff;
  rec["sample_size_factor"] = 1.0 / eff;
  return rec;
}

void write_sweep(std::ostream& os, const std::vector<SweepRow>& rows, Format format) {
  if (format == Format::kJson) {
    Json arr = Json::array();
    for (const auto& r : rows) {
      Json o;
      o["axis"] = std::string(axis_name(r.axis));
      o["r"] = r.r;
      o["ratio"] = r.ratio;
      o["u"] = r.u;
      o["v"] = r.v;
      o["w_star"] = r.w_star;
      o["phi_star"] = r.phi_star;
      o["phi_balanced"] = r.phi_balanced;
      o["efficiency"] = r.efficiency;
      arr.push_back(std::move(o));
    }
    os << arr.dump(2) << '\n';
    return;
  }
  os << "axis,r,ratio,u,v,w_star,phi_star,phi_balanced,efficiency\n";
  for (const auto& r : rows) {
    os << axis_name(r.axis) << ',' << num(r.r) << ',' << num(r.ratio) << ',' << num(r.u) << ','
       << num(r.v) << ',' << num(r.w_star) << ',' << num(r.phi_star) << ',' << num(r.phi_balanced)
       << ',' << num(r.efficiency) << '\n';
  }
}

Json simulate_record(const SimConfig& config, const McReport& rep) {
  Json rec;
  rec["K"] = config.design.dims().centers();
  rec["N"] = config.design.dims().per_center();
  rec["n"] = config.design.treated();
  rec["u"] = config.ratios.intercept();
  rec["v"] = config.ratios.effect();
  rec["mu"] = config.mean_intercept;
  rec["alpha"] = config.mean_effect;
  rec["sigma"] = config.sigma;
  rec["reps"] = rep.replications;
  rec["seed"] = config.master_seed;
  rec["empirical_trace"] = rep.trace.mean;
  rec["analytic_trace"] = rep.analytic_trace;
  rec["relative_error"] = rep.relative_error;
  rec["standard_error"] = json_number(rep.trace.standard_error);
  rec["z_score"] = std::isfinite(rep.trace.standard_error)
                       ? json_number(std::abs(rep.trace.mean - rep.analytic_trace) / rep.trace.standard_error)
                       : Json(nullptr);
  rec["empirical_averaging_part"] = rep.averaging_part.mean;
  rec["analytic_averaging_part"] = rep.analytic_averaging_part;
  rec["averaging_part_standard_error"] = json_number(rep.averaging_part.standard_error);
  rec["empirical_centering_part"] = rep.centering_part.mean;
  rec["analytic_centering_part"] = rep.analytic_centering_part;
  rec["centering_part_standard_error"] = json_number(rep.centering_part.standard_error);
  rec["within_3_se"] = rep.within(3.0);
  return rec;
}

// ---------------------------------------------------------------------------
// predict: raw observations -> per-center BLUPs

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

struct GroupSums {
  double treatment = 0.0;
  double control = 0.0;
  int treated = 0;
  int controls = 0;
};

struct ObservationTable {
  std::vector<long> ids;
  CenterSummaries summaries;
  ExactDesign design;
};

ObservationTable read_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");

  std::string line;
  if (!std::getline(in, line) || trim(line) != "center,group,y") {
    throw DataError("data file must start with the header 'center,group,y'");
  }
  std::map<long, GroupSums> centers;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    const std::string where = "line " + std::to_string(line_no);
    if (fields.size() != 3) throw DataError(where + ": expected 3 fields");

    long id = 0;
    auto [p_id, ec_id] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), id);
    if (ec_id != std::errc() || p_id != fields[0].data() + fields[0].size()) {
      throw DataError(where + ": center id must be an integer");
    }
    double y = 0.0;
    auto [p_y, ec_y] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), y);
    if (ec_y != std::errc() || p_y != fields[2].data() + fields[2].size() || !std::isfinite(y)) {
      throw DataError(where + " (center " + std::to_string(id) + "): y must be a finite number");
    }
    GroupSums& sums = centers[id];
    if (fields[1] == "T") {
      sums.treatment += y;
      ++sums.treated;
    } else if (fields[1] == "C") {
      sums.control += y;
      ++sums.controls;
    } else {
      throw DataError(where + " (center " + std::to_string(id) + "): group must be T or C");
    }
  }
  if (centers.empty()) throw DataError("data file contains no observations");

  const auto& first = centers.begin()->second;
  std::vector<long> ids;
  std::vector<double> yt;
  std::vector<double> yc;
  for (const auto& [id, sums] : centers) {
    if (sums.treated == 0 || sums.controls == 0) {
      throw DataError("center " + std::to_string(id) + " lacks a " +
                      (sums.treated == 0 ? "treatment" : "control") + " group");
    }
    if (sums.treated != first.treated || sums.controls != first.controls) {
      throw DataError("center " + std::to_string(id) + " is unbalanced: " + std::to_string(sums.treated) +
                      " T / " + std::to_string(sums.controls) + " C, expected " +
                      std::to_string(first.treated) + " T / " + std::to_string(first.controls) + " C");
    }
    ids.push_back(id);
    yt.push_back(sums.treatment / sums.treated);
    yc.push_back(sums.control / sums.controls);
  }
  const ModelDims dims(static_cast<int>(ids.size()), first.treated + first.controls);
  return {std::move(ids), CenterSummaries(std::move(yt), std::move(yc)), ExactDesign(dims, first.treated)};
}

void write_predictions(std::ostream& os, const ObservationTable& table, const VarianceRatios& ratios,
                       Format format) {
  const BlupWeights weights = blup_weights(table.design, ratios);
  const CenterPredictions pred = predict_scalar(table.summaries, weights);
  const auto ind = individual_estimates(table.summaries);
  const CenterParams pop = population_blue(table.summaries);

  if (format == Format::kJson) {
    Json rec;
    rec["K"] = table.design.dims().centers();
    rec["N"] = table.design.dims().per_center();
    rec["n"] = table.design.treated();
    rec["u"] = ratios.intercept();
    rec["v"] = ratios.effect();
    rec["weights"] = {{"c0", weights.c0}, {"c", weights.c}, {"c1", weights.c1}, {"c2", weights.c2},
                      {"delta", weights.delta}};
    rec["population"] = {{"mu_hat", pop.intercept}, {"alpha_hat", pop.effect}};
    Json centers = Json::array();
    for (std::size_t i = 0; i < pred.size(); ++i) {
      centers.push_back({{"center", table.ids[i]},
                         {"mu_hat", pred[i].intercept},
                         {"alpha_hat", pred[i].effect},
                         {"mu_ind", ind[i].intercept},
                         {"alpha_ind", ind[i].effect}});
    }
    rec["centers"] = std::move(centers);
    os << rec.dump(2) << '\n';
    return;
  }
  os << "center,mu_hat,alpha_hat,mu_ind,alpha_ind\n";
  for (std::size_t i = 0; i < pred.size(); ++i) {
    os << table.ids[i] << ',' << num(pred[i].intercept) << ',' << num(pred[i].effect) << ','
       << num(ind[i].intercept) << ',' << num(ind[i].effect) << '\n';
  }
  os << "population," << num(pop.intercept) << ',' << num(pop.effect) << ',' << num(pop.intercept)
     << ',' << num(pop.effect) << '\n';
}

Format resolve(Format requested, Format fallback) {
  return requested == Format::kDefault ? fallback : requested;
}

}  // namespace

unsigned thread_hint() {
  if (const char* env = std::getenv("HIERMED_THREADS")) {
    const std::string_view s(env);
    unsigned value = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec == std::errc() && p == s.data() + s.size() && value > 0) return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal treatment allocation for predicting center effects in multi-center trials"};
  app.require_subcommand(1);
  app.fallthrough();

  Format format = Format::kDefault;
  const std::map<std::string, Format> formats{
      {"text", Format::kText}, {"json", Format::kJson}, {"csv", Format::kCsv}};
  app.add_option("--format", format, "output format")->transform(CLI::CheckedTransformer(formats));
  std::string out_path;
  app.add_option("--out", out_path, "write results to this file instead of stdout");

  Point point;
  double tol = kDefaultTolerance;

  auto* optimize = app.add_subcommand("optimize", "A-optimal allocation rate");
  point.add_to(*optimize);
  optimize->add_option("--tol", tol, "bracket tolerance on w");
  bool exact = false;
  optimize->add_flag("--exact", exact, "also report the optimal exact design");

  auto* criterion = app.add_subcommand("criterion", "A-criterion at a given design");
  Point crit_point;
  crit_point.add_to(*criterion);
  std::optional<double> crit_rate;
  std::optional<int> crit_treated;
  auto* w_opt = criterion->add_option("--w", crit_rate, "allocation rate");
  auto* n_opt = criterion->add_option("--n", crit_treated, "treatment group size");
  w_opt->excludes(n_opt);
  n_opt->excludes(w_opt);

  auto* eff = app.add_subcommand("efficiency", "efficiency of a reference allocation rate");
  Point eff_point;
  eff_point.add_to(*eff);
  double reference = kBalancedRate;
  eff->add_option("--w", reference, "reference allocation rate (default 0.5)");
  eff->add_option("--tol", tol, "bracket tolerance on w");

  auto* sweep = app.add_subcommand("sweep", "optimal allocation over a rescaled variance-ratio grid");
  std::string axis;
  std::vector<double> fixed;
  int grid_points = 0;
  int sweep_k = 0;
  int sweep_n = 0;
  std::string q_held = "u";
  sweep->add_option("--axis", axis, "swept ratio: v, u or q = v/u")->required();
  sweep->add_option("--fixed", fixed, "comma-separated values of the held ratio")->required()->delimiter(',');
  sweep->add_option("--grid", grid_points, "number of midpoint grid points in (0, 1)")->required();
  sweep->add_option("--K", sweep_k, "number of centers")->required();
  sweep->add_option("--N", sweep_n, "subjects per center")->required();
  sweep->add_option("--tol", tol, "bracket tolerance on w");
  sweep->add_option("--q-fixed", q_held, "ratio held fixed in a q sweep: u or v")
      ->check(CLI::IsMember({"u", "v"}));

  auto* predict = app.add_subcommand("predict", "BLUPs of center intercepts and treatment effects");
  std::string data_path;
  double pred_u = 0.0;
  double pred_v = 0.0;
  predict->add_option("--data", data_path, "CSV with columns center,group,y")->required();
  predict->add_option("--u", pred_u, "intercept variance ratio")->required();
  predict->add_option("--v", pred_v, "treatment-effect variance ratio")->required();

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of the analytic MSE trace");
  Point sim_point;
  sim_point.add_to(*simulate);
  int sim_treated = 0;
  long reps = 0;
  std::uint64_t seed = 0;
  double sim_mu = 0.0;
  double sim_alpha = 1.0;
  double sim_sigma = 1.0;
  simulate->add_option("--n", sim_treated, "treatment group size")->required();
  simulate->add_option("--reps", reps, "replications")->required();
  simulate->add_option("--seed", seed, "master seed")->required();
  simulate->add_option("--mu", sim_mu, "population mean intercept");
  simulate->add_option("--alpha", sim_alpha, "population mean treatment effect");
  simulate->add_option("--sigma", sim_sigma, "residual standard deviation");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    const int code = app.exit(e, msg, msg);
    if (code == 0) {
      out << msg.str();
      return kSuccess;
    }
    err << msg.str();
    return kUsageError;
  }

  std::ofstream file;
  std::ostringstream buffer;
  try {
    const unsigned threads = thread_hint();
    if (optimize->parsed()) {
      write_record(buffer, optimize_record(point, tol, exact), resolve(format, Format::kText));
    } else if (criterion->parsed()) {
      if (!crit_rate && !crit_treated) throw InvalidArgument("criterion needs one of --w or --n");
      write_record(buffer, criterion_record(crit_point, crit_rate, crit_treated), resolve(format, Format::kText));
    } else if (eff->parsed()) {
      write_record(buffer, efficiency_record(eff_point, reference, tol), resolve(format, Format::kText));
    } else if (sweep->parsed()) {
      SweepSpec spec;
      spec.axis = parse_axis(axis);
      spec.quotient_held = q_held == "v" ? QuotientHeld::kEffect : QuotientHeld::kIntercept;
      spec.fixed_values = fixed;
      spec.grid = midpoint_grid(grid_points);
      spec.dims = ModelDims(sweep_k, sweep_n);
      spec.tol = tol;
      write_sweep(buffer, run_sweep(spec, threads), resolve(format, Format::kCsv));
    } else if (predict->parsed()) {
      const VarianceRatios ratios(pred_u, pred_v);
      write_predictions(buffer, read_observations(data_path), ratios, resolve(format, Format::kCsv));
    } else if (simulate->parsed()) {
      SimConfig config;
      config.design = ExactDesign(sim_point.dims(), sim_treated);
      config.ratios = sim_point.ratios();
      config.mean_intercept = sim_mu;
      config.mean_effect = sim_alpha;
      config.sigma = sim_sigma;
      config.replications = reps;
      config.master_seed = seed;
      config.validate();
      write_record(buffer, simulate_record(config, empirical_mse(config, threads)),
                   resolve(format, Format::kJson));
    }
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  if (out_path.empty()) {
    out << buffer.str();
  } else {
    file.open(out_path, std::ios::binary);
    if (!file || !(file << buffer.str())) {
      err << "error: cannot write '" << out_path << "'\n";
      return kUsageError;
    }
  }
  return kSuccess;
}

}  // namespace hiermed::cli
