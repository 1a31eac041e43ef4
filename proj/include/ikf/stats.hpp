#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ikf/dataset.hpp"
#include "ikf/detail/parallel.hpp"
#include "ikf/harness.hpp"
#include "ikf/learners.hpp"
#include "ikf/metrics.hpp"
#include "ikf/partition.hpp"
#include "ikf/rng.hpp"
#include "ikf/synthetic.hpp"

namespace ikf {

// Monte-Carlo study of the cross-validation estimator. All estimates here are
// losses, 1 - metric (misclassification rate for accuracy), so a positive
// bias means the estimator is pessimistic.

enum class DataSource {
  Fixed,      ///< re-partition one dataset with fresh seeds
  Synthetic,  ///< draw a fresh dataset from a generator every repetition
};

std::string_view to_string(DataSource source) noexcept;

template <typename Scalar>
struct MonteCarloConfig {
  std::size_t repetitions = 200;
  Scheme scheme = Scheme::IkF;
  int k = 5;
  ModelSpec model{ModelKind::GaussianNb};
  MetricKind metric = MetricKind::Accuracy;
  DataSource source = DataSource::Synthetic;
  std::optional<Dataset<Scalar>> dataset;       // Fixed
  std::optional<SyntheticGenerator> generator;  // Synthetic
  std::size_t sample_size = 600;                // Synthetic
  std::optional<double> reference_risk;         // theta, a loss in [0, 1]
  std::string reference_note;
  std::uint64_t seed = kDefaultSeed;
  bool stratified = false;
  AssignmentStrategy strategy = AssignmentStrategy::RandomLatin;
  bool parallel = false;
};

struct MseDecomposition {
  double bias = 0.0;
  double bias_squared = 0.0;
  double variance = 0.0;
  double mse = 0.0;

  bool operator==(const MseDecomposition&) const = default;
};

/// Empirical moments of an R x k matrix of fold estimates.
/// Population (1/R) normalisation unless the name says sample.
struct FoldMoments {
  Eigen::VectorXd run_estimates;    // row means
  Eigen::VectorXd fold_variance;    // diag of covariance
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd covariance_sample;
  double mean_estimate = 0.0;
  double estimator_variance = 0.0;  // Var of run_estimates
  double estimator_variance_sample = 0.0;
  double variance_independent = 0.0;  // trace(C) / k^2
  double variance_with_cov = 0.0;     // 1'C1 / k^2
  double mean_offdiag_covariance = 0.0;
  double mean_offdiag_covariance_se = 0.0;

  bool operator==(const FoldMoments&) const = default;
};

FoldMoments fold_moments(const Eigen::MatrixXd& fold_estimates);

struct MonteCarloReport {
  Scheme scheme = Scheme::IkF;
  int k = 0;
  std::size_t repetitions = 0;
  MetricKind metric = MetricKind::Accuracy;
  DataSource source = DataSource::Synthetic;
  std::size_t sample_size = 0;
  std::uint64_t seed = 0;
  std::string model;
  Eigen::MatrixXd fold_estimates;  // R x k losses
  FoldMoments moments;
  // Per-run count of training sets each sample joined, extremes over all runs.
  std::size_t training_uses_min = 0;
  std::size_t training_uses_max = 0;
  std::optional<double> reference_risk;
  std::string reference_note;
  std::optional<MseDecomposition> mse;

  bool operator==(const MonteCarloReport&) const = default;
};

/// bias = mean - theta, variance with 1/R, mse = mean (x - theta)^2.
MseDecomposition mse_decomposition(std::span<const double> run_estimates, double reference_risk);

/// Throws MissingReference when neither argument nor report carries theta.
MseDecomposition mse_decomposition(const MonteCarloReport& report,
                                   std::optional<double> reference_risk = std::nullopt);

struct ReferenceRisk {
  double risk = 0.0;
  double std_error = 0.0;
  std::size_t train_size = 0;
  std::size_t holdout_size = 0;
  std::size_t train_draws = 0;
};

inline constexpr std::size_t kMinHoldout = 100000;

/// Risk of a model trained on `train_size` fresh samples, measured on one
/// shared holdout of `holdout_size` samples and averaged over `train_draws`
/// training sets.
template <typename Scalar = double>
ReferenceRisk estimate_reference_risk(const SyntheticGenerator& gen, const ModelSpec& spec,
                                      std::size_t train_size, std::size_t holdout_size,
                                      std::uint64_t seed, std::size_t train_draws = 1,
                                      MetricKind metric = MetricKind::Accuracy) {
  if (holdout_size < kMinHoldout)
    throw Error(ErrorCode::InvalidArgument, "holdout must hold at least " + std::to_string(kMinHoldout) +
                                                " samples");
  if (train_size < 1 || train_draws < 1)
    throw Error(ErrorCode::InvalidArgument, "train size and draw count must be positive");

  const auto holdout = generate_synthetic<Scalar>(gen, holdout_size, derive_seed(seed, 0));
  std::vector<double> losses;
  for (std::size_t draw = 0; draw < train_draws; ++draw) {
    const auto train = generate_synthetic<Scalar>(gen, train_size, derive_seed(seed, draw + 1));
    auto model = make_classifier<Scalar>(spec);
    model->fit(train.features(), train.labels(), gen.num_classes());
    const auto predicted = model->predict(holdout.features());
    const auto cm = confusion(holdout.labels(), predicted, gen.num_classes());
    losses.push_back(1.0 - evaluate(cm, metric).value);
  }

  ReferenceRisk out;
  out.train_size = train_size;
  out.holdout_size = holdout_size;
  out.train_draws = train_draws;
  for (const double l : losses) out.risk += l;
  out.risk /= static_cast<double>(losses.size());
  double between = 0.0;
  for (const double l : losses) between += (l - out.risk) * (l - out.risk);
  if (losses.size() > 1) between /= static_cast<double>(losses.size() - 1);
  out.std_error = std::sqrt(between / static_cast<double>(losses.size()) +
                            out.risk * (1.0 - out.risk) / static_cast<double>(holdout_size));
  return out;
}

namespace detail {

template <typename Scalar>
Dataset<Scalar> repetition_data(const MonteCarloConfig<Scalar>& config, std::size_t rep) {
  if (config.source == DataSource::Fixed) return *config.dataset;
  return generate_synthetic<Scalar>(*config.generator, config.sample_size, derive_seed(config.seed, 2 * rep));
}

inline std::uint64_t repetition_partition_seed(std::uint64_t seed, std::size_t rep) {
  return derive_seed(seed, 2 * rep + 1);
}

}  // namespace detail

/// Repetition r uses data seed derive_seed(seed, 2r) and partition seed
/// derive_seed(seed, 2r+1) for either scheme, so IkF and kF runs with the same
/// config see the same samples and the same test folds.
template <typename Scalar>
MonteCarloReport monte_carlo(const MonteCarloConfig<Scalar>& config) {
  if (config.repetitions < 2)
    throw Error(ErrorCode::InsufficientRepetitions,
                "Monte-Carlo needs at least 2 repetitions, got " + std::to_string(config.repetitions));
  if (config.source == DataSource::Fixed && !config.dataset)
    throw Error(ErrorCode::InvalidArgument, "fixed-dataset Monte-Carlo needs a dataset");
  if (config.source == DataSource::Synthetic && !config.generator)
    throw Error(ErrorCode::InvalidArgument, "synthetic Monte-Carlo needs a generator");
  if (config.reference_risk && !(*config.reference_risk >= 0.0 && *config.reference_risk <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "reference risk must lie in [0, 1]");

  RunOptions options;
  options.scheme = config.scheme;
  options.k = config.k;
  options.stratified = config.stratified;
  options.strategy = config.strategy;
  options.metrics = {config.metric};

  // Feasibility is a function of shape only; check once up front.
  {
    const auto probe = detail::repetition_data(config, 0);
    const auto verdict = scheme_feasibility(probe.size(), probe.class_counts(), options);
    if (!verdict.feasible) throw Error(ErrorCode::InfeasiblePartition, verdict.message);
  }

  const auto k = static_cast<std::size_t>(config.k);
  const ClassifierFactory<Scalar> factory = [spec = config.model] { return make_classifier<Scalar>(spec); };
  Eigen::MatrixXd estimates(static_cast<Eigen::Index>(config.repetitions), config.k);
  std::vector<std::size_t> uses_min(config.repetitions), uses_max(config.repetitions);

  ikf::detail::parallel_for(config.repetitions, config.parallel, [&](std::size_t rep) {
    const auto data = detail::repetition_data(config, rep);
    const auto splits = make_splits(config.scheme, data.size(), data.labels(), config.k,
                                    detail::repetition_partition_seed(config.seed, rep),
                                    config.stratified, config.strategy);
    const auto folds = evaluate_splits(data, splits, factory, options.metrics, false);
    for (std::size_t i = 0; i < k; ++i)
      estimates(static_cast<Eigen::Index>(rep), static_cast<Eigen::Index>(i)) =
          1.0 - folds[i].metric_values.front().value;

    std::vector<std::size_t> uses(data.size(), 0);
    for (const auto& s : splits)
      for (const auto idx : s.train) ++uses[idx];
    const auto [lo, hi] = std::minmax_element(uses.begin(), uses.end());
    uses_min[rep] = *lo;
    uses_max[rep] = *hi;
  });

  MonteCarloReport report;
  report.scheme = config.scheme;
  report.k = config.k;
  report.repetitions = config.repetitions;
  report.metric = config.metric;
  report.source = config.source;
  report.sample_size = config.source == DataSource::Fixed ? config.dataset->size() : config.sample_size;
  report.seed = config.seed;
  report.model = factory()->name();
  report.fold_estimates = std::move(estimates);
  report.moments = fold_moments(report.fold_estimates);
  report.training_uses_min = *std::min_element(uses_min.begin(), uses_min.end());
  report.training_uses_max = *std::max_element(uses_max.begin(), uses_max.end());
  report.reference_risk = config.reference_risk;
  report.reference_note = config.reference_note;
  if (config.reference_risk) report.mse = mse_decomposition(report);
  return report;
}

struct TradeOffRow {
  Scheme scheme = Scheme::IkF;
  int k = 0;
  double mean_estimate = 0.0;
  double bias = 0.0;
  double variance_independent = 0.0;
  double variance_with_cov = 0.0;
  double mse = 0.0;  // bias^2 + variance_with_cov

  bool operator==(const TradeOffRow&) const = default;
};

struct SweepOptions {
  std::size_t repetitions = 200;
  std::size_t sample_size = 600;
  std::uint64_t seed = kDefaultSeed;
  MetricKind metric = MetricKind::Accuracy;
  bool stratified = false;
  bool parallel = false;
  /// theta; estimated for a model trained on sample_size samples when absent.
  std::optional<double> reference_risk;
  std::size_t reference_draws = 10;
};

struct TradeOffTable {
  double reference_risk = 0.0;
  std::string reference_note;
  std::vector<TradeOffRow> rows;  // IkF then kF for each k, in k_values order

  bool operator==(const TradeOffTable&) const = default;
};

/// Bias / variance / MSE per (scheme, k) on synthetic data. Both schemes at
/// a given k share data and partition seeds.
template <typename Scalar = double>
TradeOffTable trade_off_sweep(const SyntheticGenerator& gen, const ModelSpec& spec,
                              std::span<const int> k_values, const SweepOptions& options) {
  TradeOffTable table;
  if (options.reference_risk) {
    table.reference_risk = *options.reference_risk;
    table.reference_note = "supplied";
  } else {
    const auto ref = estimate_reference_risk<Scalar>(gen, spec, options.sample_size, kMinHoldout,
                                                     derive_seed(options.seed, 0xBEEF),
                                                     options.reference_draws, options.metric);
    table.reference_risk = ref.risk;
    table.reference_note = "estimated: model trained on " + std::to_string(options.sample_size) +
                           " samples, " + std::to_string(ref.train_draws) + " draws, holdout " +
                           std::to_string(ref.holdout_size) + ", se " + std::to_string(ref.std_error);
  }

  for (const int k : k_values) {
    for (const auto scheme : {Scheme::IkF, Scheme::kF}) {
      MonteCarloConfig<Scalar> config;
      config.repetitions = options.repetitions;
      config.scheme = scheme;
      config.k = k;
      config.model = spec;
      config.metric = options.metric;
      config.source = DataSource::Synthetic;
      config.generator = gen;
      config.sample_size = options.sample_size;
      config.reference_risk = table.reference_risk;
      config.seed = options.seed;
      config.stratified = options.stratified;
      config.parallel = options.parallel;
      const auto report = monte_carlo(config);

      TradeOffRow row;
      row.scheme = scheme;
      row.k = k;
      row.mean_estimate = report.moments.mean_estimate;
      row.bias = report.mse->bias;
      row.variance_independent = report.moments.variance_independent;
      row.variance_with_cov = report.moments.variance_with_cov;
      row.mse = row.bias * row.bias + row.variance_with_cov;
      table.rows.push_back(row);
    }
  }
  return table;
}

}  // namespace ikf
