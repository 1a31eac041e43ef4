#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace ikf {

enum class MetricKind { Accuracy, FScoreMacro, FScoreBinary };

std::string_view to_string(MetricKind kind) noexcept;
std::optional<MetricKind> metric_from_string(std::string_view name) noexcept;

struct MetricValue {
  MetricKind name = MetricKind::Accuracy;
  double value = 0.0;

  bool operator==(const MetricValue&) const = default;
};

/// counts(t, p): test samples of true class t predicted as p.
struct ConfusionMatrix {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;

  std::int64_t total() const { return counts.sum(); }
  int num_classes() const { return static_cast<int>(counts.rows()); }
};

ConfusionMatrix confusion(std::span<const int> true_labels, std::span<const int> predicted_labels,
                          int num_classes);

MetricValue accuracy(const ConfusionMatrix& cm);

enum class FScoreAveraging { Macro, BinaryPositiveClass };

/// Macro: unweighted mean of per-class F1 over the classes that occur in the
/// truth or the predictions; a class with P + R = 0 scores 0.
/// BinaryPositiveClass: F1 of class 1, requires c = 2.
MetricValue f_score(const ConfusionMatrix& cm, FScoreAveraging averaging = FScoreAveraging::Macro);

MetricValue evaluate(const ConfusionMatrix& cm, MetricKind kind);

}  // namespace ikf
