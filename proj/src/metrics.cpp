#include "ikf/metrics.hpp"

#include <string>

#include "ikf/error.hpp"

namespace ikf {
namespace {

void require_scored(const ConfusionMatrix& cm) {
  if (cm.total() <= 0) throw Error(ErrorCode::EmptyTestSet, "metric requested on an empty test set");
}

double class_f1(const ConfusionMatrix& cm, int c) {
  const auto tp = static_cast<double>(cm.counts(c, c));
  const auto predicted = static_cast<double>(cm.counts.col(c).sum());
  const auto actual = static_cast<double>(cm.counts.row(c).sum());
  const double precision = predicted > 0 ? tp / predicted : 0.0;
  const double recall = actual > 0 ? tp / actual : 0.0;
  return precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

}  // namespace

std::string_view to_string(MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::Accuracy: return "accuracy";
    case MetricKind::FScoreMacro: return "f1_macro";
    case MetricKind::FScoreBinary: return "f1_binary";
  }
  return "unknown";
}

std::optional<MetricKind> metric_from_string(std::string_view name) noexcept {
  if (name == "accuracy" || name == "acc") return MetricKind::Accuracy;
  if (name == "f1_macro" || name == "f1" || name == "fsc") return MetricKind::FScoreMacro;
  if (name == "f1_binary") return MetricKind::FScoreBinary;
  return std::nullopt;
}

ConfusionMatrix confusion(std::span<const int> true_labels, std::span<const int> predicted_labels,
                          int num_classes) {
  if (true_labels.size() != predicted_labels.size())
    throw Error(ErrorCode::LengthMismatch, "true (" + std::to_string(true_labels.size()) +
                                               ") and predicted (" +
                                               std::to_string(predicted_labels.size()) +
                                               ") label counts differ");
  if (num_classes < 1) throw Error(ErrorCode::InvalidArgument, "class count must be >= 1");

  ConfusionMatrix cm{decltype(ConfusionMatrix::counts)::Zero(num_classes, num_classes)};
  for (std::size_t s = 0; s < true_labels.size(); ++s) {
    const int t = true_labels[s];
    const int p = predicted_labels[s];
    if (t < 0 || t >= num_classes || p < 0 || p >= num_classes)
      throw Error(ErrorCode::LabelOutOfRange, "label pair (" + std::to_string(t) + ", " +
                                                  std::to_string(p) + ") outside [0, " +
                                                  std::to_string(num_classes) + ")");
    ++cm.counts(t, p);
  }
  return cm;
}

MetricValue accuracy(const ConfusionMatrix& cm) {
  require_scored(cm);
  return {MetricKind::Accuracy,
          static_cast<double>(cm.counts.trace()) / static_cast<double>(cm.total())};
}

MetricValue f_score(const ConfusionMatrix& cm, FScoreAveraging averaging) {
  require_scored(cm);
  if (averaging == FScoreAveraging::BinaryPositiveClass) {
    if (cm.num_classes() != 2)
      throw Error(ErrorCode::NotBinary, "binary F-score needs 2 classes, got " +
                                            std::to_string(cm.num_classes()));
    return {MetricKind::FScoreBinary, class_f1(cm, 1)};
  }
  // Classes absent from both truth and predictions carry no information.
  double sum = 0.0;
  int seen = 0;
  for (int c = 0; c < cm.num_classes(); ++c) {
    if (cm.counts.row(c).sum() == 0 && cm.counts.col(c).sum() == 0) continue;
    sum += class_f1(cm, c);
    ++seen;
  }
  return {MetricKind::FScoreMacro, sum / seen};
}

MetricValue evaluate(const ConfusionMatrix& cm, MetricKind kind) {
  switch (kind) {
    case MetricKind::Accuracy: return accuracy(cm);
    case MetricKind::FScoreMacro: return f_score(cm, FScoreAveraging::Macro);
    case MetricKind::FScoreBinary: return f_score(cm, FScoreAveraging::BinaryPositiveClass);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown metric");
}

}  // namespace ikf
