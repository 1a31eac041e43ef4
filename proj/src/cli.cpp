#include "ikf/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ikf/csv.hpp"
#include "ikf/harness.hpp"
#include "ikf/report.hpp"
#include "ikf/stats.hpp"
#include "ikf/synthetic.hpp"

namespace ikf {
namespace {

constexpr const char* kSeedEnv = "IKF_SEED";

struct CommonArgs {
  int k = 5;
  std::optional<std::uint64_t> seed;
  bool stratified = false;
  std::string assignment = "latin";
  std::string parallel = "on";
  std::string format = "md";
};

struct DataArgs {
  std::string csv;
  std::string label_column = "-1";
  std::string delimiter = ",";
  bool no_header = false;
  std::string synthetic;
  std::size_t n = 0;
  int dims = 10;
  int num_classes = 2;
  double separation = 1.0;
};

struct ModelArgs {
  std::string model = "knn";
  int neighbors = 5;
  std::vector<std::string> metrics = {"accuracy", "f1_macro"};
  bool standardize = false;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_parallel = true) {
  cmd->add_option("--k", a.k, "Number of folds")->check(CLI::Range(2, 1 << 20));
  cmd->add_option("--seed", a.seed, "64-bit seed (default: $IKF_SEED, else a fixed constant)");
  cmd->add_flag("--stratified", a.stratified, "Keep class proportions in folds and subfolds");
  cmd->add_option("--assignment", a.assignment, "Subfold assignment")->check(CLI::IsMember({"shift", "latin"}));
  if (with_parallel)
    cmd->add_option("--parallel", a.parallel, "Fold-level parallelism")->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--format", a.format, "Output format")->check(CLI::IsMember({"json", "md"}));
}

void add_data(CLI::App* cmd, DataArgs& d, std::string default_synthetic = {}) {
  d.synthetic = std::move(default_synthetic);
  cmd->add_option("--csv", d.csv, "Input CSV file");
  cmd->add_option("--label-column", d.label_column, "Label column name or index (default: last)");
  cmd->add_option("--delimiter", d.delimiter, "CSV field delimiter");
  cmd->add_flag("--no-header", d.no_header, "CSV has no header row");
  cmd->add_option("--synthetic", d.synthetic, "Synthetic task instead of a CSV")
      ->check(CLI::IsMember({"gauss1d", "blobs", "banknote-like"}));
  cmd->add_option("--n", d.n, "Synthetic sample count");
  cmd->add_option("--dims", d.dims, "Synthetic blob dimensionality")->check(CLI::PositiveNumber);
  cmd->add_option("--num-classes", d.num_classes, "Synthetic blob class count")->check(CLI::PositiveNumber);
  cmd->add_option("--separation", d.separation, "Synthetic blob centre distance from origin");
}

void add_model(CLI::App* cmd, ModelArgs& m) {
  cmd->add_option("--model", m.model, "Classifier")->check(CLI::IsMember({"knn", "nb", "constant"}));
  cmd->add_option("--neighbors", m.neighbors, "k-NN neighbour count")->check(CLI::PositiveNumber);
  cmd->add_option("--metrics", m.metrics, "Metrics (accuracy, f1_macro, f1_binary)")->delimiter(',');
  cmd->add_flag("--standardize", m.standardize, "z-score features with training-fold statistics");
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kSeedEnv); env && *env) {
    std::uint64_t value = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
      throw Error(ErrorCode::InvalidArgument, std::string(kSeedEnv) + " is not a 64-bit unsigned integer");
    return value;
  }
  return kDefaultSeed;
}

SyntheticGenerator generator_for(const DataArgs& d) {
  if (d.synthetic == "gauss1d") return two_gaussian_1d();
  if (d.synthetic == "banknote-like") return banknote_like();
  return gaussian_blobs(d.num_classes, d.dims, d.separation);
}

std::size_t default_size(const std::string& synthetic) {
  if (synthetic == "gauss1d") return 600;
  if (synthetic == "banknote-like") return 1372;
  return 5000;
}

struct LoadedData {
  Dataset<double> data;
  std::string name;
};

LoadedData load_data(const DataArgs& d, std::uint64_t seed) {
  if (!d.csv.empty()) {
    CsvSchema schema;
    schema.path = d.csv;
    schema.header = !d.no_header;
    if (d.delimiter.size() != 1) throw Error(ErrorCode::InvalidArgument, "delimiter must be one character");
    schema.delimiter = d.delimiter.front();
    int index = 0;
    const auto* end = d.label_column.data() + d.label_column.size();
    const auto [ptr, ec] = std::from_chars(d.label_column.data(), end, index);
    if (ec == std::errc{} && ptr == end) {
      schema.label_column = index;
    } else {
      schema.label_column = d.label_column;
    }
    return {load_csv(schema), std::filesystem::path(d.csv).stem().string()};
  }
  if (d.synthetic.empty()) throw Error(ErrorCode::InvalidArgument, "give --csv PATH or --synthetic TASK");
  const std::size_t n = d.n > 0 ? d.n : default_size(d.synthetic);
  return {generate_synthetic<double>(generator_for(d), n, derive_seed(seed, 0xDA7A)), d.synthetic};
}

ModelSpec model_spec(const ModelArgs& m) {
  ModelSpec spec;
  spec.kind = *model_from_string(m.model);
  spec.neighbors = m.neighbors;
  return spec;
}

std::vector<MetricKind> metric_kinds(const std::vector<std::string>& names) {
  std::vector<MetricKind> out;
  for (const auto& name : names) {
    const auto kind = metric_from_string(name);
    if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown metric '" + name + "'");
    out.push_back(*kind);
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "at least one metric is required");
  return out;
}

Scheme scheme_from(const std::string& s) { return s == "kf" ? Scheme::kF : Scheme::IkF; }

AssignmentStrategy strategy_from(const std::string& s) {
  return s == "shift" ? AssignmentStrategy::CanonicalShift : AssignmentStrategy::RandomLatin;
}

RunOptions run_options(const CommonArgs& c, const ModelArgs& m, std::uint64_t seed) {
  RunOptions o;
  o.k = c.k;
  o.seed = seed;
  o.stratified = c.stratified;
  o.strategy = strategy_from(c.assignment);
  o.metrics = metric_kinds(m.metrics);
  o.parallel = c.parallel == "on";
  o.standardize = m.standardize;
  return o;
}

void emit(std::ostream& out, const json& doc) { out << doc.dump(2) << '\n'; }

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Irredundant and standard k-fold cross-validation", "ikf"};
  app.require_subcommand(1);

  // split
  CommonArgs split_c;
  DataArgs split_d;
  std::string split_scheme = "ikf";
  std::vector<int> split_labels;
  auto* split = app.add_subcommand("split", "Emit train/test index partitions");
  add_common(split, split_c, false);
  add_data(split, split_d);
  split->add_option("--labels", split_labels, "Class labels for --n (comma separated)")->delimiter(',');
  split->add_option("--scheme", split_scheme, "Scheme")->check(CLI::IsMember({"ikf", "kf"}));

  // check
  CommonArgs check_c;
  std::optional<std::size_t> check_n;
  std::vector<std::size_t> check_classes;
  std::string check_scheme = "ikf";
  auto* check = app.add_subcommand("check", "Feasibility verdict for (n, classes, k)");
  add_common(check, check_c, false);
  check->add_option("--n", check_n, "Sample count (default: sum of --classes)");
  check->add_option("--classes", check_classes, "Per-class sample counts")->delimiter(',');
  check->add_option("--scheme", check_scheme, "Scheme")->check(CLI::IsMember({"ikf", "kf"}));

  // run
  CommonArgs run_c;
  DataArgs run_d;
  ModelArgs run_m;
  std::string run_scheme_name = "ikf";
  auto* run = app.add_subcommand("run", "Evaluate one scheme");
  add_common(run, run_c);
  add_data(run, run_d);
  add_model(run, run_m);
  run->add_option("--scheme", run_scheme_name, "Scheme")->check(CLI::IsMember({"ikf", "kf"}));

  // compare
  CommonArgs cmp_c;
  DataArgs cmp_d;
  ModelArgs cmp_m;
  int cmp_repeats = 1;
  std::string cmp_name;
  auto* cmp = app.add_subcommand("compare", "IkF vs kF comparison row");
  add_common(cmp, cmp_c);
  add_data(cmp, cmp_d);
  add_model(cmp, cmp_m);
  cmp->add_option("--repeats", cmp_repeats, "Repeats per scheme")->check(CLI::PositiveNumber);
  cmp->add_option("--name", cmp_name, "Dataset label in the table");

  // montecarlo
  CommonArgs mc_c;
  DataArgs mc_d;
  std::string mc_model = "nb";
  int mc_neighbors = 5;
  std::string mc_metric = "accuracy";
  std::string mc_scheme = "ikf";
  std::string mc_mode;
  std::size_t mc_reps = 200;
  std::optional<double> mc_reference;
  bool mc_estimate_reference = false;
  auto* mc = app.add_subcommand("montecarlo", "Bias / variance / covariance of the CV estimator");
  add_common(mc, mc_c);
  add_data(mc, mc_d, "gauss1d");
  mc->add_option("--model", mc_model, "Classifier")->check(CLI::IsMember({"knn", "nb", "constant"}));
  mc->add_option("--neighbors", mc_neighbors, "k-NN neighbour count")->check(CLI::PositiveNumber);
  mc->add_option("--metric", mc_metric, "Metric the loss is derived from");
  mc->add_option("--scheme", mc_scheme, "Scheme")->check(CLI::IsMember({"ikf", "kf"}));
  mc->add_option("--mode", mc_mode, "fixed: re-partition one dataset; synthetic: fresh data per repetition")
      ->check(CLI::IsMember({"fixed", "synthetic"}));
  mc->add_option("--reps", mc_reps, "Repetitions R");
  mc->add_option("--reference", mc_reference, "Reference risk theta in [0, 1]");
  mc->add_flag("--estimate-reference", mc_estimate_reference,
               "Estimate theta on a 100000-sample holdout (synthetic tasks only)");

  // sweep
  CommonArgs sw_c;
  DataArgs sw_d;
  std::string sw_model = "nb";
  int sw_neighbors = 5;
  std::vector<int> sw_ks = {2, 3, 5, 10};
  std::size_t sw_reps = 200;
  std::optional<double> sw_reference;
  auto* sw = app.add_subcommand("sweep", "Bias-variance trade-off table over k");
  sw->add_option("--k-values", sw_ks, "Fold counts to sweep")->delimiter(',');
  sw->add_option("--seed", sw_c.seed, "64-bit seed");
  sw->add_flag("--stratified", sw_c.stratified, "Stratified folds");
  sw->add_option("--parallel", sw_c.parallel, "Repetition-level parallelism")->check(CLI::IsMember({"on", "off"}));
  sw->add_option("--format", sw_c.format, "Output format")->check(CLI::IsMember({"json", "md", "csv"}));
  add_data(sw, sw_d, "gauss1d");
  sw->add_option("--model", sw_model, "Classifier")->check(CLI::IsMember({"knn", "nb", "constant"}));
  sw->add_option("--neighbors", sw_neighbors, "k-NN neighbour count")->check(CLI::PositiveNumber);
  sw->add_option("--reps", sw_reps, "Repetitions per (scheme, k)");
  sw->add_option("--reference", sw_reference, "Reference risk theta (default: estimated)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*split) {
      const std::uint64_t seed = resolve_seed(split_c.seed);
      SplitRequest req{scheme_from(split_scheme), split_d.n, split_c.k, seed, split_c.stratified,
                       strategy_from(split_c.assignment)};
      std::optional<Dataset<double>> data;
      if (!split_d.csv.empty() || !split_d.synthetic.empty()) {
        data = load_data(split_d, seed).data;
        req.n = data->size();
      }
      if (!split_labels.empty()) {
        if (req.n == 0) req.n = split_labels.size();
        if (req.n != split_labels.size())
          throw Error(ErrorCode::LengthMismatch, "--labels must have n entries");
      }
      if (req.n == 0) throw Error(ErrorCode::InvalidArgument, "give --n, --labels, --csv or --synthetic");
      LabelView labels = std::nullopt;
      if (data) {
        labels = std::span<const int>(data->labels());
      } else if (!split_labels.empty()) {
        labels = std::span<const int>(split_labels);
      }

      std::optional<PartitionPlan> plan;
      std::vector<SplitPair> splits;
      if (req.scheme == Scheme::IkF) {
        plan = make_plan(req.n, labels, req.k, seed, req.stratified, req.strategy);
        splits = build_ikf_splits(*plan);
      } else {
        splits = make_splits(Scheme::kF, req.n, labels, req.k, seed, req.stratified, req.strategy);
      }
      if (split_c.format == "json") {
        emit(out, split_document(req, splits, plan ? &*plan : nullptr));
      } else {
        out << split_markdown(req, splits);
      }
      return kExitOk;
    }

    if (*check) {
      std::size_t n = check_n.value_or(std::accumulate(check_classes.begin(), check_classes.end(), std::size_t{0}));
      const auto counts = check_classes.empty() ? std::nullopt
                                                : std::optional<std::span<const std::size_t>>(check_classes);
      const auto verdict = scheme_from(check_scheme) == Scheme::IkF
                               ? check_feasibility(n, counts, check_c.k, check_c.stratified)
                               : check_kfold_feasibility(n, counts, check_c.k, check_c.stratified);
      if (check_c.format == "json") {
        emit(out, feasibility_document(n, check_c.k, check_c.stratified, verdict));
      } else {
        out << feasibility_markdown(n, check_c.k, check_c.stratified, verdict);
      }
      if (!verdict.feasible) {
        err << verdict.message << '\n';
        return kExitInfeasible;
      }
      return kExitOk;
    }

    if (*run) {
      const std::uint64_t seed = resolve_seed(run_c.seed);
      const auto loaded = load_data(run_d, seed);
      auto options = run_options(run_c, run_m, seed);
      options.scheme = scheme_from(run_scheme_name);
      const auto report = run_scheme(loaded.data, options, model_spec(run_m));
      if (run_c.format == "json") {
        emit(out, evaluation_document(report));
      } else {
        out << evaluation_markdown(report);
      }
      return kExitOk;
    }

    if (*cmp) {
      const std::uint64_t seed = resolve_seed(cmp_c.seed);
      const auto loaded = load_data(cmp_d, seed);
      const auto options = run_options(cmp_c, cmp_m, seed);
      const auto report = compare(loaded.data, options, model_spec(cmp_m), cmp_repeats,
                                  cmp_name.empty() ? loaded.name : cmp_name);
      if (cmp_c.format == "json") {
        emit(out, comparison_document(report));
      } else {
        out << comparison_markdown(report);
      }
      return kExitOk;
    }

    if (*mc) {
      const std::uint64_t seed = resolve_seed(mc_c.seed);
      MonteCarloConfig<double> config;
      config.repetitions = mc_reps;
      config.scheme = scheme_from(mc_scheme);
      config.k = mc_c.k;
      config.model = {*model_from_string(mc_model), mc_neighbors};
      const auto metric = metric_from_string(mc_metric);
      if (!metric) throw Error(ErrorCode::InvalidArgument, "unknown metric '" + mc_metric + "'");
      config.metric = *metric;
      config.seed = seed;
      config.stratified = mc_c.stratified;
      config.strategy = strategy_from(mc_c.assignment);
      config.parallel = mc_c.parallel == "on";
      const bool fixed = mc_mode == "fixed" || (mc_mode.empty() && !mc_d.csv.empty());
      if (!fixed && !mc_d.csv.empty())
        throw Error(ErrorCode::InvalidArgument, "synthetic mode needs --synthetic, not --csv");
      if (fixed) {
        config.source = DataSource::Fixed;
        config.dataset = load_data(mc_d, seed).data;
      } else {
        config.source = DataSource::Synthetic;
        config.generator = generator_for(mc_d);
        config.sample_size = mc_d.n > 0 ? mc_d.n : default_size(mc_d.synthetic);
      }
      if (mc_reference) {
        config.reference_risk = *mc_reference;
        config.reference_note = "supplied";
      } else if (mc_estimate_reference) {
        if (fixed) throw Error(ErrorCode::InvalidArgument, "reference risk estimation needs a synthetic task");
        const auto ref = estimate_reference_risk<double>(*config.generator, config.model, config.sample_size,
                                                         kMinHoldout, derive_seed(seed, 0xBEEF), 10, config.metric);
        config.reference_risk = ref.risk;
        config.reference_note = "estimated: model trained on " + std::to_string(ref.train_size) +
                                " samples, 10 draws, holdout 100000";
      }
      const auto report = monte_carlo(config);
      if (mc_c.format == "json") {
        emit(out, montecarlo_document(report));
      } else {
        out << montecarlo_markdown(report);
      }
      return kExitOk;
    }

    if (*sw) {
      if (!sw_d.csv.empty()) throw Error(ErrorCode::InvalidArgument, "sweep runs on synthetic tasks only");
      SweepOptions options;
      options.repetitions = sw_reps;
      options.sample_size = sw_d.n > 0 ? sw_d.n : default_size(sw_d.synthetic);
      options.seed = resolve_seed(sw_c.seed);
      options.stratified = sw_c.stratified;
      options.parallel = sw_c.parallel == "on";
      options.reference_risk = sw_reference;
      const auto table = trade_off_sweep<double>(generator_for(sw_d), {*model_from_string(sw_model), sw_neighbors},
                                                 sw_ks, options);
      if (sw_c.format == "json") {
        emit(out, sweep_document(table));
      } else if (sw_c.format == "csv") {
        out << sweep_csv(table);
      } else {
        out << sweep_markdown(table);
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return is_infeasibility(e.code()) ? kExitInfeasible : kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace ikf
