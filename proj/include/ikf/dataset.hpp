#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ikf/error.hpp"

namespace ikf {

template <typename Scalar>
using FeatureMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using IndexList = std::vector<std::size_t>;

/// Counts of each class index in `labels`; result has `num_classes` entries.
inline std::vector<std::size_t> count_classes(std::span<const int> labels, int num_classes) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
  for (const int y : labels) {
    if (y < 0 || y >= num_classes)
      throw Error(ErrorCode::LabelOutOfRange,
                  "label " + std::to_string(y) + " outside [0, " + std::to_string(num_classes) + ")");
    ++counts[static_cast<std::size_t>(y)];
  }
  return counts;
}

/// Labelled sample matrix: one row per sample, class indices in [0, c).
template <typename Scalar>
class Dataset {
 public:
  Dataset() = default;

  Dataset(FeatureMatrix<Scalar> features, std::vector<int> labels, int num_classes,
          std::vector<std::string> class_names = {})
      : features_(std::move(features)),
        labels_(std::move(labels)),
        class_names_(std::move(class_names)) {
    if (static_cast<std::size_t>(features_.rows()) != labels_.size())
      throw Error(ErrorCode::LengthMismatch, "feature rows (" + std::to_string(features_.rows()) +
                                                 ") != label count (" +
                                                 std::to_string(labels_.size()) + ")");
    if (num_classes < 1) throw Error(ErrorCode::InvalidArgument, "dataset needs at least one class");
    class_counts_ = count_classes(labels_, num_classes);
  }

  std::size_t size() const noexcept { return labels_.size(); }
  Eigen::Index dims() const noexcept { return features_.cols(); }
  int num_classes() const noexcept { return static_cast<int>(class_counts_.size()); }

  const FeatureMatrix<Scalar>& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<std::size_t>& class_counts() const noexcept { return class_counts_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }

  std::size_t min_class_count() const noexcept {
    return class_counts_.empty() ? 0 : *std::min_element(class_counts_.begin(), class_counts_.end());
  }

  template <typename Other>
  Dataset<Other> cast() const {
    return Dataset<Other>(features_.template cast<Other>(), labels_, num_classes(), class_names_);
  }

 private:
  FeatureMatrix<Scalar> features_;
  std::vector<int> labels_;
  std::vector<std::size_t> class_counts_;
  std::vector<std::string> class_names_;
};

/// Rows of `features` at `rows`, in that order.
template <typename Derived>
FeatureMatrix<typename Derived::Scalar> gather_rows(const Eigen::MatrixBase<Derived>& features,
                                                    std::span<const std::size_t> rows) {
  FeatureMatrix<typename Derived::Scalar> out(static_cast<Eigen::Index>(rows.size()), features.cols());
  for (std::size_t r = 0; r < rows.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(rows[r]));
  return out;
}

inline std::vector<int> gather_labels(std::span<const int> labels, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (const auto r : rows) out.push_back(labels[r]);
  return out;
}

}  // namespace ikf
