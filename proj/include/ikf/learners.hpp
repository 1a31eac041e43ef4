#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ikf/dataset.hpp"
#include "ikf/error.hpp"

namespace ikf {

/// Model-agnostic classifier interface used by the evaluation harness.
/// After fit() the object is only read; predict() may be called concurrently.
template <typename Scalar>
class Classifier {
 public:
  using Matrix = FeatureMatrix<Scalar>;

  virtual ~Classifier() = default;

  virtual void fit(const Eigen::Ref<const Matrix>& features, std::span<const int> labels,
                   int num_classes) = 0;
  virtual std::vector<int> predict(const Eigen::Ref<const Matrix>& features) const = 0;
  virtual std::string name() const = 0;
};

namespace detail {

inline void check_training_set(Eigen::Index rows, std::size_t labels) {
  if (rows == 0 || labels == 0) throw Error(ErrorCode::EmptyTrainingSet, "training set is empty");
  if (static_cast<std::size_t>(rows) != labels)
    throw Error(ErrorCode::DimensionMismatch, "training rows (" + std::to_string(rows) +
                                                  ") != label count (" + std::to_string(labels) + ")");
}

inline int infer_num_classes(std::span<const int> labels) {
  int c = 0;
  for (const int y : labels) {
    if (y < 0) throw Error(ErrorCode::LabelOutOfRange, "negative class label " + std::to_string(y));
    c = std::max(c, y + 1);
  }
  return c;
}

inline void check_query_dims(Eigen::Index got, Eigen::Index want) {
  if (got != want)
    throw Error(ErrorCode::DimensionMismatch, "query has " + std::to_string(got) +
                                                  " features, model was fit on " + std::to_string(want));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// k-nearest neighbours

template <typename Scalar>
struct KnnModel {
  int neighbors = 5;
  int num_classes = 0;
  FeatureMatrix<Scalar> features;
  std::vector<int> labels;

  int effective_neighbors() const noexcept {
    return std::min(neighbors, static_cast<int>(labels.size()));
  }
};

template <typename Derived>
KnnModel<typename Derived::Scalar> knn_fit(const Eigen::MatrixBase<Derived>& features,
                                           std::span<const int> labels, int neighbors = 5,
                                           std::optional<int> num_classes = std::nullopt) {
  detail::check_training_set(features.rows(), labels.size());
  if (neighbors < 1)
    throw Error(ErrorCode::InvalidArgument, "neighbors must be >= 1, got " + std::to_string(neighbors));
  KnnModel<typename Derived::Scalar> model;
  model.neighbors = neighbors;
  model.num_classes = std::max(num_classes.value_or(0), detail::infer_num_classes(labels));
  model.features = features;
  model.labels.assign(labels.begin(), labels.end());
  return model;
}

/// Majority vote over the Euclidean-nearest training points. Equal distances
/// prefer the lower training index; equal votes prefer the smaller class.
template <typename Scalar, typename Derived>
std::vector<int> knn_predict(const KnnModel<Scalar>& model, const Eigen::MatrixBase<Derived>& queries) {
  detail::check_query_dims(queries.cols(), model.features.cols());
  const auto n_train = static_cast<std::size_t>(model.features.rows());
  const auto kk = static_cast<std::size_t>(model.effective_neighbors());

  std::vector<int> out(static_cast<std::size_t>(queries.rows()));
  std::vector<std::pair<Scalar, std::size_t>> dist(n_train);
  std::vector<int> votes(static_cast<std::size_t>(model.num_classes));
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    const auto query = queries.row(q);
    for (std::size_t t = 0; t < n_train; ++t)
      dist[t] = {(model.features.row(static_cast<Eigen::Index>(t)) - query).squaredNorm(), t};
    if (kk < n_train)
      std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk - 1), dist.end());

    std::fill(votes.begin(), votes.end(), 0);
    for (std::size_t r = 0; r < kk; ++r) ++votes[static_cast<std::size_t>(model.labels[dist[r].second])];
    out[static_cast<std::size_t>(q)] =
        static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

enum class AbsentClassPolicy {
  Error,  ///< throw DegenerateClass if some class in [0, c) has no samples
  Skip,   ///< absent classes get prior 0 and are never predicted
};

template <typename Scalar>
struct GaussianNbModel {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Eigen::VectorXd priors;  // per class, sums to 1
  Matrix means;            // classes x features
  Matrix variances;        // classes x features, every entry >= epsilon
  Scalar epsilon{};
};

/// Relative variance floor: epsilon = floor_scale * max feature variance.
inline constexpr double kVarianceFloorScale = 1e-9;

template <typename Derived>
GaussianNbModel<typename Derived::Scalar> nb_fit(const Eigen::MatrixBase<Derived>& features,
                                                 std::span<const int> labels,
                                                 std::optional<int> num_classes = std::nullopt,
                                                 AbsentClassPolicy absent = AbsentClassPolicy::Error) {
  using Scalar = typename Derived::Scalar;
  detail::check_training_set(features.rows(), labels.size());
  const int c = std::max(num_classes.value_or(0), detail::infer_num_classes(labels));
  const Eigen::Index d = features.cols();
  const auto n = static_cast<Scalar>(labels.size());

  GaussianNbModel<Scalar> model;
  model.priors = Eigen::VectorXd::Zero(c);
  model.means.setZero(c, d);
  model.variances.setZero(c, d);

  std::vector<std::size_t> counts(static_cast<std::size_t>(c), 0);
  for (std::size_t s = 0; s < labels.size(); ++s) {
    ++counts[static_cast<std::size_t>(labels[s])];
    model.means.row(labels[s]) += features.row(static_cast<Eigen::Index>(s));
  }
  for (int k = 0; k < c; ++k) {
    if (counts[static_cast<std::size_t>(k)] == 0 && absent == AbsentClassPolicy::Error)
      throw Error(ErrorCode::DegenerateClass, "class " + std::to_string(k) + " has no training samples");
    if (counts[static_cast<std::size_t>(k)] > 0)
      model.means.row(k) /= static_cast<Scalar>(counts[static_cast<std::size_t>(k)]);
  }
  for (std::size_t s = 0; s < labels.size(); ++s)
    model.variances.row(labels[s]) +=
        (features.row(static_cast<Eigen::Index>(s)) - model.means.row(labels[s])).array().square().matrix();

  // Global per-feature variance sets the floor scale.
  const auto global_mean = (features.colwise().sum() / n).eval();
  Scalar max_var{0};
  for (Eigen::Index j = 0; j < d; ++j)
    max_var = std::max(max_var, (features.col(j).array() - global_mean(j)).square().sum() / n);
  model.epsilon = static_cast<Scalar>(kVarianceFloorScale) * (max_var > Scalar{0} ? max_var : Scalar{1});

  for (int k = 0; k < c; ++k) {
    const auto count = counts[static_cast<std::size_t>(k)];
    model.priors(k) = static_cast<double>(count) / static_cast<double>(labels.size());
    if (count > 0) model.variances.row(k) /= static_cast<Scalar>(count);
    model.variances.row(k) = model.variances.row(k).cwiseMax(model.epsilon);
  }
  return model;
}

/// Joint log-likelihood per class; -inf for classes with prior 0.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> nb_log_scores(
    const GaussianNbModel<Scalar>& model, const Eigen::MatrixBase<Derived>& queries) {
  detail::check_query_dims(queries.cols(), model.means.cols());
  const Eigen::Index c = model.means.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> scores(queries.rows(), c);
  constexpr Scalar two_pi = static_cast<Scalar>(2.0 * std::numbers::pi);
  for (Eigen::Index k = 0; k < c; ++k) {
    if (model.priors(k) <= 0.0) {
      scores.col(k).setConstant(-std::numeric_limits<Scalar>::infinity());
      continue;
    }
    const auto var = model.variances.row(k).array();
    const Scalar log_norm = -Scalar{0.5} * (two_pi * var).log().sum() +
                            static_cast<Scalar>(std::log(model.priors(k)));
    for (Eigen::Index q = 0; q < queries.rows(); ++q)
      scores(q, k) = log_norm - Scalar{0.5} * ((queries.row(q).array() - model.means.row(k).array())
                                                   .square() / var).sum();
  }
  return scores;
}

/// argmax of log prior plus Gaussian log-likelihood; ties go to the smaller class.
template <typename Scalar, typename Derived>
std::vector<int> nb_predict(const GaussianNbModel<Scalar>& model, const Eigen::MatrixBase<Derived>& queries) {
  const auto scores = nb_log_scores(model, queries);
  std::vector<int> out(static_cast<std::size_t>(queries.rows()));
  for (Eigen::Index q = 0; q < scores.rows(); ++q) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < scores.cols(); ++k)
      if (scores(q, k) > scores(q, best)) best = k;
    out[static_cast<std::size_t>(q)] = static_cast<int>(best);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Classifier adapters

template <typename Scalar>
class KnnClassifier final : public Classifier<Scalar> {
 public:
  using typename Classifier<Scalar>::Matrix;

  explicit KnnClassifier(int neighbors = 5) : neighbors_(neighbors) {}

  void fit(const Eigen::Ref<const Matrix>& features, std::span<const int> labels, int num_classes) override {
    model_ = knn_fit(features, labels, neighbors_, num_classes);
  }
  std::vector<int> predict(const Eigen::Ref<const Matrix>& features) const override {
    return knn_predict(model_, features);
  }
  std::string name() const override { return "knn(" + std::to_string(neighbors_) + ")"; }

 private:
  int neighbors_;
  KnnModel<Scalar> model_;
};

template <typename Scalar>
class GaussianNbClassifier final : public Classifier<Scalar> {
 public:
  using typename Classifier<Scalar>::Matrix;

  // Unstratified training sets may miss a class; that class is simply never predicted.
  void fit(const Eigen::Ref<const Matrix>& features, std::span<const int> labels, int num_classes) override {
    model_ = nb_fit(features, labels, num_classes, AbsentClassPolicy::Skip);
  }
  std::vector<int> predict(const Eigen::Ref<const Matrix>& features) const override {
    return nb_predict(model_, features);
  }
  std::string name() const override { return "gaussian_nb"; }

 private:
  GaussianNbModel<Scalar> model_;
};

/// Ignores its input and always predicts one class.
template <typename Scalar>
class ConstantClassifier final : public Classifier<Scalar> {
 public:
  using typename Classifier<Scalar>::Matrix;

  explicit ConstantClassifier(int label = 0) : label_(label) {}

  void fit(const Eigen::Ref<const Matrix>& features, std::span<const int> labels, int) override {
    detail::check_training_set(features.rows(), labels.size());
  }
  std::vector<int> predict(const Eigen::Ref<const Matrix>& features) const override {
    return std::vector<int>(static_cast<std::size_t>(features.rows()), label_);
  }
  std::string name() const override { return "constant(" + std::to_string(label_) + ")"; }

 private:
  int label_;
};

enum class ModelKind { Knn, GaussianNb, Constant };

struct ModelSpec {
  ModelKind kind = ModelKind::Knn;
  int neighbors = 5;
  int constant_label = 0;

  bool operator==(const ModelSpec&) const = default;
};

std::string_view to_string(ModelKind kind) noexcept;
std::optional<ModelKind> model_from_string(std::string_view name) noexcept;

template <typename Scalar>
std::unique_ptr<Classifier<Scalar>> make_classifier(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::Knn: return std::make_unique<KnnClassifier<Scalar>>(spec.neighbors);
    case ModelKind::GaussianNb: return std::make_unique<GaussianNbClassifier<Scalar>>();
    case ModelKind::Constant: return std::make_unique<ConstantClassifier<Scalar>>(spec.constant_label);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown model kind");
}

}  // namespace ikf
