#include "ikf/harness.hpp"

namespace ikf {
namespace {

std::vector<MetricValue> mean_of(const std::vector<std::vector<MetricValue>>& rows) {
  std::vector<MetricValue> out;
  if (rows.empty()) return out;
  out = rows.front();
  for (auto& m : out) m.value = 0.0;
  for (const auto& row : rows)
    for (std::size_t i = 0; i < out.size(); ++i) out[i].value += row[i].value;
  for (auto& m : out) m.value /= static_cast<double>(rows.size());
  return out;
}

SchemeSummary summarize(Scheme scheme, std::vector<EvaluationReport> runs) {
  SchemeSummary s;
  s.scheme = scheme;
  std::vector<std::vector<MetricValue>> rows;
  for (const auto& run : runs) {
    rows.push_back(run.mean_metrics);
    s.total_time += run.total_time;
  }
  s.mean_metrics = mean_of(rows);
  s.runs = std::move(runs);
  return s;
}

std::optional<double> ratio(std::optional<double> num, std::optional<double> den) {
  if (!num || !den || !(*den > 0.0)) return std::nullopt;
  return *num / *den;
}

std::optional<double> fscore_of(const SchemeSummary& s) {
  if (auto v = s.mean(MetricKind::FScoreMacro)) return v;
  return s.mean(MetricKind::FScoreBinary);
}

}  // namespace

FeasibilityVerdict scheme_feasibility(std::size_t n, std::span<const std::size_t> class_counts,
                                      const RunOptions& options) {
  const auto counts = options.stratified ? std::optional<std::span<const std::size_t>>(class_counts)
                                         : std::nullopt;
  return options.scheme == Scheme::IkF ? check_feasibility(n, counts, options.k, options.stratified)
                                       : check_kfold_feasibility(n, counts, options.k, options.stratified);
}

EvaluationReport aggregate(const RunOptions& options, std::string model, std::vector<FoldReport> folds) {
  EvaluationReport report;
  report.scheme = options.scheme;
  report.k = options.k;
  report.seed = options.seed;
  report.stratified = options.stratified;
  report.strategy = options.strategy;
  report.model = std::move(model);

  std::vector<std::vector<MetricValue>> rows;
  for (const auto& f : folds) {
    rows.push_back(f.metric_values);
    report.total_time += f.fit_time + f.predict_time;
  }
  report.mean_metrics = mean_of(rows);
  report.folds = std::move(folds);
  return report;
}

ComparisonReport summarize_comparison(std::vector<EvaluationReport> ikf_runs,
                                      std::vector<EvaluationReport> kf_runs) {
  ComparisonReport report;
  if (!ikf_runs.empty()) {
    report.model = ikf_runs.front().model;
    report.k = ikf_runs.front().k;
    report.seed = ikf_runs.front().seed;
  }
  report.repeats = static_cast<int>(ikf_runs.size());
  report.ikf = summarize(Scheme::IkF, std::move(ikf_runs));
  report.kf = summarize(Scheme::kF, std::move(kf_runs));
  report.r_acc = ratio(report.kf.mean(MetricKind::Accuracy), report.ikf.mean(MetricKind::Accuracy));
  report.r_fsc = ratio(fscore_of(report.kf), fscore_of(report.ikf));
  report.speed_up = ratio(report.kf.total_time, report.ikf.total_time);
  return report;
}

}  // namespace ikf
