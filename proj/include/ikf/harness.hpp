#pragma once

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ikf/dataset.hpp"
#include "ikf/detail/parallel.hpp"
#include "ikf/learners.hpp"
#include "ikf/metrics.hpp"
#include "ikf/partition.hpp"

namespace ikf {

/// Seed used when neither --seed nor IKF_SEED is given.
inline constexpr std::uint64_t kDefaultSeed = 20250607;

struct RunOptions {
  Scheme scheme = Scheme::IkF;
  int k = 5;
  std::uint64_t seed = kDefaultSeed;
  bool stratified = false;
  AssignmentStrategy strategy = AssignmentStrategy::RandomLatin;
  std::vector<MetricKind> metrics = {MetricKind::Accuracy, MetricKind::FScoreMacro};
  bool parallel = false;
  bool standardize = false;  // z-score features with training-set statistics
};

struct FoldReport {
  int iteration = 0;
  std::vector<MetricValue> metric_values;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double fit_time = 0.0;      // seconds
  double predict_time = 0.0;  // seconds

  bool operator==(const FoldReport&) const = default;
};

struct EvaluationReport {
  Scheme scheme = Scheme::IkF;
  int k = 0;
  std::uint64_t seed = 0;
  bool stratified = false;
  AssignmentStrategy strategy = AssignmentStrategy::RandomLatin;
  std::string model;
  std::vector<FoldReport> folds;
  std::vector<MetricValue> mean_metrics;  // unweighted mean over folds
  double total_time = 0.0;                // sum of fit + predict over folds

  std::optional<double> mean(MetricKind kind) const {
    for (const auto& m : mean_metrics)
      if (m.name == kind) return m.value;
    return std::nullopt;
  }

  bool operator==(const EvaluationReport&) const = default;
};

/// One scheme's repeats inside a comparison.
struct SchemeSummary {
  Scheme scheme = Scheme::IkF;
  std::vector<MetricValue> mean_metrics;  // averaged over repeats
  double total_time = 0.0;                // summed over repeats
  std::vector<EvaluationReport> runs;

  std::optional<double> mean(MetricKind kind) const {
    for (const auto& m : mean_metrics)
      if (m.name == kind) return m.value;
    return std::nullopt;
  }

  bool operator==(const SchemeSummary&) const = default;
};

/// kF / IkF ratios in the layout of a comparison table row.
struct ComparisonReport {
  std::string dataset;
  std::size_t samples = 0;
  std::size_t variables = 0;
  int classes = 0;
  int k = 0;
  std::uint64_t seed = 0;
  int repeats = 1;
  std::string model;
  SchemeSummary ikf;
  SchemeSummary kf;
  std::optional<double> r_acc;  // Acc_kF / Acc_IkF
  std::optional<double> r_fsc;  // Fsc_kF / Fsc_IkF
  std::optional<double> speed_up;  // Time_kF / Time_IkF

  bool operator==(const ComparisonReport&) const = default;
};

template <typename Scalar>
using ClassifierFactory = std::function<std::unique_ptr<Classifier<Scalar>>()>;

/// Training cost ratio C_kF / C_IkF for C(n) ∝ n^cost_exponent: (k-1)^e.
inline double predicted_cost_ratio(int k, double cost_exponent) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be >= 2");
  if (!(cost_exponent >= 1.0)) throw Error(ErrorCode::InvalidArgument, "cost exponent must be >= 1");
  return std::pow(static_cast<double>(k - 1), cost_exponent);
}

/// Throws InfeasiblePartition with the remediation message if `options`
/// cannot be run on a dataset of this shape.
FeasibilityVerdict scheme_feasibility(std::size_t n, std::span<const std::size_t> class_counts,
                                      const RunOptions& options);

namespace detail {

template <typename Scalar>
void standardize_in_place(FeatureMatrix<Scalar>& train, FeatureMatrix<Scalar>& test) {
  const auto rows = static_cast<Scalar>(train.rows());
  const auto mean = (train.colwise().sum() / rows).eval();
  train.rowwise() -= mean;
  test.rowwise() -= mean;
  auto sd = (train.colwise().squaredNorm() / rows).cwiseSqrt().eval();
  for (Eigen::Index j = 0; j < sd.size(); ++j)
    if (!(sd(j) > Scalar{0})) sd(j) = Scalar{1};
  train.array().rowwise() /= sd.array();
  test.array().rowwise() /= sd.array();
}

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace detail

/// Fits one fresh model per split and scores it on that split's test set.
/// Fold reports come back in split order whatever the execution order.
template <typename Scalar>
std::vector<FoldReport> evaluate_splits(const Dataset<Scalar>& data, std::span<const SplitPair> splits,
                                        const ClassifierFactory<Scalar>& factory,
                                        std::span<const MetricKind> metrics, bool parallel,
                                        bool standardize = false) {
  std::vector<FoldReport> reports(splits.size());
  ikf::detail::parallel_for(splits.size(), parallel, [&](std::size_t f) {
    const auto& split = splits[f];
    auto train = gather_rows(data.features(), split.train);
    auto test = gather_rows(data.features(), split.test);
    if (standardize) detail::standardize_in_place(train, test);
    const auto train_labels = gather_labels(data.labels(), split.train);
    const auto test_labels = gather_labels(data.labels(), split.test);

    auto model = factory();
    auto start = std::chrono::steady_clock::now();
    model->fit(train, train_labels, data.num_classes());
    const double fit_time = detail::seconds_since(start);
    start = std::chrono::steady_clock::now();
    const auto predicted = model->predict(test);
    const double predict_time = detail::seconds_since(start);

    const auto cm = confusion(test_labels, predicted, data.num_classes());
    FoldReport& report = reports[f];
    report.iteration = split.iteration;
    report.train_size = split.train.size();
    report.test_size = split.test.size();
    report.fit_time = fit_time;
    report.predict_time = predict_time;
    for (const auto kind : metrics) report.metric_values.push_back(evaluate(cm, kind));
  });
  return reports;
}

/// Fold-order aggregation: unweighted metric means and summed timings.
EvaluationReport aggregate(const RunOptions& options, std::string model, std::vector<FoldReport> folds);

template <typename Scalar>
EvaluationReport run_scheme(const Dataset<Scalar>& data, const RunOptions& options,
                            const ClassifierFactory<Scalar>& factory, std::string model_name) {
  const auto verdict = scheme_feasibility(data.size(), data.class_counts(), options);
  if (!verdict.feasible) throw Error(ErrorCode::InfeasiblePartition, verdict.message);

  const auto splits = make_splits(options.scheme, data.size(), data.labels(), options.k, options.seed,
                                  options.stratified, options.strategy);
  auto folds = evaluate_splits(data, splits, factory, options.metrics, options.parallel, options.standardize);
  return aggregate(options, std::move(model_name), std::move(folds));
}

template <typename Scalar>
EvaluationReport run_scheme(const Dataset<Scalar>& data, const RunOptions& options, const ModelSpec& spec) {
  const ClassifierFactory<Scalar> factory = [spec] { return make_classifier<Scalar>(spec); };
  return run_scheme(data, options, factory, factory()->name());
}

/// Seed of repeat r: seed XOR r (repeat 0 reproduces a single run).
constexpr std::uint64_t repeat_seed(std::uint64_t seed, int repeat) noexcept {
  return seed ^ static_cast<std::uint64_t>(repeat);
}

/// Averages metrics and sums times over repeats, then forms the ratios.
ComparisonReport summarize_comparison(std::vector<EvaluationReport> ikf_runs,
                                      std::vector<EvaluationReport> kf_runs);

/// Runs IkF and kF `repeats` times each on the same seeds.
template <typename Scalar>
ComparisonReport compare(const Dataset<Scalar>& data, RunOptions options, const ModelSpec& spec,
                         int repeats = 1, std::string dataset_name = "dataset") {
  if (repeats < 1) throw Error(ErrorCode::InvalidArgument, "repeats must be >= 1");
  for (const auto scheme : {Scheme::IkF, Scheme::kF}) {
    options.scheme = scheme;
    const auto verdict = scheme_feasibility(data.size(), data.class_counts(), options);
    if (!verdict.feasible) throw Error(ErrorCode::InfeasiblePartition, verdict.message);
  }

  const std::uint64_t base_seed = options.seed;
  std::vector<EvaluationReport> ikf_runs, kf_runs;
  for (int r = 0; r < repeats; ++r) {
    options.seed = repeat_seed(base_seed, r);
    options.scheme = Scheme::IkF;
    ikf_runs.push_back(run_scheme(data, options, spec));
    options.scheme = Scheme::kF;
    kf_runs.push_back(run_scheme(data, options, spec));
  }
  auto report = summarize_comparison(std::move(ikf_runs), std::move(kf_runs));
  report.dataset = std::move(dataset_name);
  report.samples = data.size();
  report.variables = static_cast<std::size_t>(data.dims());
  report.classes = data.num_classes();
  report.k = options.k;
  report.seed = base_seed;
  report.repeats = repeats;
  return report;
}

}  // namespace ikf
