#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ikf/dataset.hpp"

namespace ikf {

/// Irredundant k-fold (IkF) or standard k-fold (kF).
enum class Scheme { IkF, kF };

/// How subfold j of fold i is matched to training sets.
enum class AssignmentStrategy {
  CanonicalShift,  ///< alpha(i, j) = i + 1 if i < j else i; seed-independent
  RandomLatin,     ///< one uniform permutation of {1..k-1} per column
};

enum class LimitingFactor { TotalSize, ClassSize };

std::string_view to_string(Scheme scheme) noexcept;
std::string_view to_string(AssignmentStrategy strategy) noexcept;
std::string_view to_string(LimitingFactor factor) noexcept;

/// k x k, entry (i, j) is the 1-based subfold of fold j that joins training
/// set i. The diagonal is unused and holds 0.
using AssignmentMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

struct PartitionPlan {
  int k = 0;
  std::vector<IndexList> folds;
  std::vector<std::vector<IndexList>> subfolds;  // subfolds[i] has k - 1 entries
  AssignmentMatrix assignment;
  std::uint64_t seed = 0;
  bool stratified = false;
  AssignmentStrategy strategy = AssignmentStrategy::RandomLatin;
};

struct SplitPair {
  int iteration = 0;
  IndexList train;
  IndexList test;

  bool operator==(const SplitPair&) const = default;
};

struct FeasibilityVerdict {
  bool feasible = false;
  std::size_t required_minimum = 0;
  LimitingFactor limiting_factor = LimitingFactor::TotalSize;
  std::string message;
};

using LabelView = std::optional<std::span<const int>>;

/// Seeded split of {0..n-1} into k folds whose sizes differ by at most one.
/// The first n mod k folds get the extra index. When stratified, each class is
/// dealt out separately and per-class remainders go round-robin from a
/// seed-derived offset. Each returned fold is sorted ascending.
std::vector<IndexList> split_folds(std::size_t n, LabelView labels, int k, std::uint64_t seed,
                                   bool stratified);

/// Same rule applied to the members of one fold. `labels` is indexed by
/// sample index, not by position in `fold`.
std::vector<IndexList> split_subfolds(std::span<const std::size_t> fold, int parts, LabelView labels,
                                      std::uint64_t seed, bool stratified);

AssignmentMatrix assign_subfolds(int k, AssignmentStrategy strategy, std::uint64_t seed);

/// Throws InvalidPlan unless every column's off-diagonal entries are a
/// permutation of {1..k-1}.
void validate_assignment(const AssignmentMatrix& assignment, int k);

FeasibilityVerdict check_feasibility(std::size_t n, std::optional<std::span<const std::size_t>> class_counts,
                                     int k, bool stratified);

/// Standard k-fold only needs n >= k (and every class >= k when stratified).
FeasibilityVerdict check_kfold_feasibility(std::size_t n,
                                           std::optional<std::span<const std::size_t>> class_counts,
                                           int k, bool stratified);

/// Builds folds, subfolds and the assignment. Feasibility is checked first;
/// violations throw TooFewSamples (total size) or StratificationInfeasible.
PartitionPlan make_plan(std::size_t n, LabelView labels, int k, std::uint64_t seed, bool stratified,
                        AssignmentStrategy strategy = AssignmentStrategy::RandomLatin);

/// Plan with a caller-chosen assignment, e.g. from a selection heuristic.
PartitionPlan make_plan(std::size_t n, LabelView labels, int k, std::uint64_t seed, bool stratified,
                        const AssignmentMatrix& assignment);

std::vector<SplitPair> build_ikf_splits(const PartitionPlan& plan);

std::vector<SplitPair> build_kf_splits(std::span<const IndexList> folds);

/// Both schemes draw their folds from the same seed stream, so for equal
/// arguments the test sets coincide and only the training sets differ.
std::vector<SplitPair> make_splits(Scheme scheme, std::size_t n, LabelView labels, int k,
                                   std::uint64_t seed, bool stratified,
                                   AssignmentStrategy strategy = AssignmentStrategy::RandomLatin);

/// Entry (i, j) = |train_i ∩ train_j| / n, with n the total test coverage.
Eigen::MatrixXd overlap_fraction(std::span<const SplitPair> splits);

}  // namespace ikf
