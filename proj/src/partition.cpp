#include "ikf/partition.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "ikf/rng.hpp"

namespace ikf {
namespace {

// Seed streams. Folds and subfolds of one plan never share a stream.
constexpr std::uint64_t kFoldStream = 0;
constexpr std::uint64_t kSubfoldStreamBase = 1;
constexpr std::uint64_t kAssignmentStream = std::uint64_t{1} << 40;

std::size_t ikf_minimum(int k) {
  return static_cast<std::size_t>(k) * static_cast<std::size_t>(k - 1);
}

// Largest k' >= 2 with k'(k'-1) <= count, or 0 if none.
int largest_feasible_k(std::size_t count) {
  int best = 0;
  for (int k = 2; ikf_minimum(k) <= count; ++k) best = k;
  return best;
}

void require_k(int k) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be >= 2, got " + std::to_string(k));
}

// Deals `items` into `parts` groups with sizes differing by at most one.
std::vector<IndexList> deal(IndexList items, int parts, LabelView labels, SplitMix64& rng,
                            bool stratified) {
  const auto p = static_cast<std::size_t>(parts);
  std::vector<IndexList> out(p);

  if (!stratified) {
    shuffle(std::span<std::size_t>(items), rng);
    const std::size_t base = items.size() / p;
    const std::size_t extra = items.size() % p;
    auto it = items.begin();
    for (std::size_t g = 0; g < p; ++g) {
      const auto len = static_cast<std::ptrdiff_t>(base + (g < extra ? 1 : 0));
      out[g].assign(it, it + len);
      it += len;
    }
  } else {
    std::map<int, IndexList> by_class;
    for (const auto idx : items) by_class[(*labels)[idx]].push_back(idx);

    std::size_t offset = rng.below(p);
    for (auto& [cls, members] : by_class) {
      shuffle(std::span<std::size_t>(members), rng);
      const std::size_t base = members.size() / p;
      const std::size_t extra = members.size() % p;
      auto it = members.begin();
      for (std::size_t g = 0; g < p; ++g) {
        const std::size_t slot = (g + p - offset) % p;
        const auto len = static_cast<std::ptrdiff_t>(base + (slot < extra ? 1 : 0));
        out[g].insert(out[g].end(), it, it + len);
        it += len;
      }
      offset = (offset + extra) % p;
    }
  }

  for (auto& group : out) std::sort(group.begin(), group.end());
  return out;
}

void check_stratifiable(std::span<const std::size_t> items, std::span<const int> labels, int parts,
                        std::string_view what) {
  std::map<int, std::size_t> counts;
  for (const auto idx : items) ++counts[labels[idx]];
  for (const auto& [cls, count] : counts) {
    if (count < static_cast<std::size_t>(parts))
      throw Error(ErrorCode::StratificationInfeasible,
                  "cannot stratify " + std::string(what) + " into " + std::to_string(parts) +
                      " parts: class " + std::to_string(cls) + " has only " + std::to_string(count) +
                      " samples");
  }
}

void check_labels(LabelView labels, std::size_t n, bool stratified) {
  if (!stratified) return;
  if (!labels)
    throw Error(ErrorCode::InvalidArgument, "stratified splitting requires class labels");
  if (labels->size() != n)
    throw Error(ErrorCode::LengthMismatch, "label count (" + std::to_string(labels->size()) +
                                               ") != n (" + std::to_string(n) + ")");
  for (const int y : *labels)
    if (y < 0) throw Error(ErrorCode::LabelOutOfRange, "negative class label " + std::to_string(y));
}

std::vector<std::size_t> class_counts_of(std::span<const int> labels) {
  int max_label = -1;
  for (const int y : labels) max_label = std::max(max_label, y);
  std::vector<std::size_t> counts(static_cast<std::size_t>(max_label + 1), 0);
  for (const int y : labels) ++counts[static_cast<std::size_t>(y)];
  std::erase(counts, std::size_t{0});
  return counts;
}

IndexList sorted_union(std::vector<const IndexList*> parts) {
  IndexList out;
  for (const auto* part : parts) out.insert(out.end(), part->begin(), part->end());
  std::sort(out.begin(), out.end());
  return out;
}

PartitionPlan make_plan_impl(std::size_t n, LabelView labels, int k, std::uint64_t seed,
                             bool stratified, AssignmentStrategy strategy,
                             const AssignmentMatrix* custom) {
  require_k(k);
  check_labels(labels, n, stratified);

  std::optional<std::vector<std::size_t>> counts;
  if (stratified) counts = class_counts_of(*labels);
  const auto verdict = check_feasibility(
      n, counts ? std::optional<std::span<const std::size_t>>(*counts) : std::nullopt, k, stratified);
  if (!verdict.feasible)
    throw Error(verdict.limiting_factor == LimitingFactor::ClassSize
                    ? ErrorCode::StratificationInfeasible
                    : ErrorCode::TooFewSamples,
                verdict.message);

  PartitionPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.stratified = stratified;
  plan.strategy = strategy;
  plan.folds = split_folds(n, labels, k, seed, stratified);
  plan.subfolds.reserve(plan.folds.size());
  for (std::size_t i = 0; i < plan.folds.size(); ++i)
    plan.subfolds.push_back(split_subfolds(plan.folds[i], k - 1, labels,
                                           derive_seed(seed, kSubfoldStreamBase + i), stratified));
  if (custom) {
    validate_assignment(*custom, k);
    plan.assignment = *custom;
  } else {
    plan.assignment = assign_subfolds(k, strategy, derive_seed(seed, kAssignmentStream));
  }
  return plan;
}

}  // namespace

std::string_view to_string(Scheme scheme) noexcept {
  return scheme == Scheme::IkF ? "IkF" : "kF";
}

std::string_view to_string(AssignmentStrategy strategy) noexcept {
  return strategy == AssignmentStrategy::CanonicalShift ? "shift" : "latin";
}

std::string_view to_string(LimitingFactor factor) noexcept {
  return factor == LimitingFactor::TotalSize ? "TotalSize" : "ClassSize";
}

std::vector<IndexList> split_folds(std::size_t n, LabelView labels, int k, std::uint64_t seed,
                                   bool stratified) {
  require_k(k);
  if (n < static_cast<std::size_t>(k))
    throw Error(ErrorCode::TooFewSamples,
                "cannot split n=" + std::to_string(n) + " samples into k=" + std::to_string(k) + " folds");
  check_labels(labels, n, stratified);

  IndexList all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (stratified) check_stratifiable(all, *labels, k, "dataset");

  SplitMix64 rng(derive_seed(seed, kFoldStream));
  return deal(std::move(all), k, labels, rng, stratified);
}

std::vector<IndexList> split_subfolds(std::span<const std::size_t> fold, int parts, LabelView labels,
                                      std::uint64_t seed, bool stratified) {
  if (parts < 1)
    throw Error(ErrorCode::InvalidArgument, "subfold count must be >= 1, got " + std::to_string(parts));
  if (fold.size() < static_cast<std::size_t>(parts))
    throw Error(ErrorCode::TooFewSamples, "fold of " + std::to_string(fold.size()) +
                                              " samples cannot hold " + std::to_string(parts) +
                                              " subfolds");
  if (stratified) {
    if (!labels) throw Error(ErrorCode::InvalidArgument, "stratified splitting requires class labels");
    for (const auto idx : fold)
      if (idx >= labels->size())
        throw Error(ErrorCode::LengthMismatch, "fold index " + std::to_string(idx) + " has no label");
    check_stratifiable(fold, *labels, parts, "fold");
  }

  IndexList items(fold.begin(), fold.end());
  std::sort(items.begin(), items.end());
  SplitMix64 rng(seed);
  return deal(std::move(items), parts, labels, rng, stratified);
}

AssignmentMatrix assign_subfolds(int k, AssignmentStrategy strategy, std::uint64_t seed) {
  require_k(k);
  AssignmentMatrix alpha = AssignmentMatrix::Zero(k, k);
  if (strategy == AssignmentStrategy::CanonicalShift) {
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < k; ++i)
        if (i != j) alpha(i, j) = i < j ? i + 1 : i;
    return alpha;
  }

  SplitMix64 rng(seed);
  std::vector<int> values(static_cast<std::size_t>(k - 1));
  for (int j = 0; j < k; ++j) {
    std::iota(values.begin(), values.end(), 1);
    shuffle(std::span<int>(values), rng);
    auto next = values.begin();
    for (int i = 0; i < k; ++i)
      if (i != j) alpha(i, j) = *next++;
  }
  return alpha;
}

void validate_assignment(const AssignmentMatrix& assignment, int k) {
  if (assignment.rows() != k || assignment.cols() != k)
    throw Error(ErrorCode::InvalidPlan, "assignment matrix must be " + std::to_string(k) + "x" +
                                            std::to_string(k));
  for (int j = 0; j < k; ++j) {
    std::vector<bool> seen(static_cast<std::size_t>(k), false);
    for (int i = 0; i < k; ++i) {
      if (i == j) continue;
      const int a = assignment(i, j);
      if (a < 1 || a > k - 1 || seen[static_cast<std::size_t>(a)])
        throw Error(ErrorCode::InvalidPlan,
                    "column " + std::to_string(j) + " of the assignment is not a permutation of 1.." +
                        std::to_string(k - 1));
      seen[static_cast<std::size_t>(a)] = true;
    }
  }
}

FeasibilityVerdict check_feasibility(std::size_t n, std::optional<std::span<const std::size_t>> class_counts,
                                     int k, bool stratified) {
  require_k(k);
  const std::size_t required = ikf_minimum(k);
  FeasibilityVerdict verdict;
  verdict.required_minimum = required;
  const std::string kk = "k(k-1) = " + std::to_string(required);

  if (!stratified) {
    verdict.limiting_factor = LimitingFactor::TotalSize;
    verdict.feasible = n >= required;
    if (verdict.feasible) {
      verdict.message = "feasible: n=" + std::to_string(n) + " >= " + kk;
    } else {
      verdict.message = "infeasible: irredundant k-fold with k=" + std::to_string(k) + " needs n >= " +
                        kk + " samples, got n=" + std::to_string(n) + " (" + std::to_string(n) +
                        " < " + std::to_string(required) + ")";
      if (const int alt = largest_feasible_k(n); alt >= 2)
        verdict.message += "; reduce k (largest feasible k is " + std::to_string(alt) + ")";
    }
    return verdict;
  }

  if (!class_counts || class_counts->empty())
    throw Error(ErrorCode::InvalidArgument, "stratified feasibility needs class counts");
  const std::size_t smallest = *std::min_element(class_counts->begin(), class_counts->end());
  verdict.limiting_factor = LimitingFactor::ClassSize;
  verdict.feasible = smallest >= required && n >= required * class_counts->size();
  if (verdict.feasible) {
    verdict.message = "feasible: smallest class has " + std::to_string(smallest) +
                      " samples >= " + kk + " per class";
  } else if (smallest < required) {
    verdict.message = "infeasible: stratified irredundant k-fold with k=" + std::to_string(k) +
                      " needs every class to have at least " + kk + " samples, smallest class has " +
                      std::to_string(smallest);
    if (const int alt = largest_feasible_k(smallest); alt >= 2)
      verdict.message += "; reduce k (e.g. k=" + std::to_string(std::min(alt, 5)) +
                         ", largest feasible k is " + std::to_string(alt) + ")";
  } else {
    // Class counts that do not sum to n; the total bound is the one violated.
    verdict.limiting_factor = LimitingFactor::TotalSize;
    verdict.message = "infeasible: n=" + std::to_string(n) + " < k(k-1)c = " +
                      std::to_string(required * class_counts->size());
  }
  return verdict;
}

FeasibilityVerdict check_kfold_feasibility(std::size_t n,
                                           std::optional<std::span<const std::size_t>> class_counts,
                                           int k, bool stratified) {
  require_k(k);
  FeasibilityVerdict verdict;
  verdict.required_minimum = static_cast<std::size_t>(k);
  if (stratified) {
    if (!class_counts || class_counts->empty())
      throw Error(ErrorCode::InvalidArgument, "stratified feasibility needs class counts");
    const std::size_t smallest = *std::min_element(class_counts->begin(), class_counts->end());
    verdict.limiting_factor = LimitingFactor::ClassSize;
    verdict.feasible = smallest >= static_cast<std::size_t>(k);
    verdict.message = verdict.feasible
                          ? "feasible"
                          : "infeasible: stratified k-fold needs every class to have at least k=" +
                                std::to_string(k) + " samples, smallest class has " +
                                std::to_string(smallest);
  } else {
    verdict.limiting_factor = LimitingFactor::TotalSize;
    verdict.feasible = n >= static_cast<std::size_t>(k);
    verdict.message = verdict.feasible ? "feasible"
                                       : "infeasible: k-fold needs n >= k=" + std::to_string(k) +
                                             ", got n=" + std::to_string(n);
  }
  return verdict;
}

PartitionPlan make_plan(std::size_t n, LabelView labels, int k, std::uint64_t seed, bool stratified,
                        AssignmentStrategy strategy) {
  return make_plan_impl(n, labels, k, seed, stratified, strategy, nullptr);
}

PartitionPlan make_plan(std::size_t n, LabelView labels, int k, std::uint64_t seed, bool stratified,
                        const AssignmentMatrix& assignment) {
  return make_plan_impl(n, labels, k, seed, stratified, AssignmentStrategy::RandomLatin, &assignment);
}

std::vector<SplitPair> build_ikf_splits(const PartitionPlan& plan) {
  const int k = plan.k;
  if (k < 2 || plan.folds.size() != static_cast<std::size_t>(k) ||
      plan.subfolds.size() != static_cast<std::size_t>(k))
    throw Error(ErrorCode::InvalidPlan, "plan must hold k folds and k subfold lists");
  for (const auto& subs : plan.subfolds)
    if (subs.size() != static_cast<std::size_t>(k - 1))
      throw Error(ErrorCode::InvalidPlan, "every fold must have k-1 subfolds");
  validate_assignment(plan.assignment, k);

  std::vector<SplitPair> splits;
  splits.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    std::vector<const IndexList*> parts;
    for (int j = 0; j < k; ++j)
      if (j != i)
        parts.push_back(&plan.subfolds[static_cast<std::size_t>(j)]
                                      [static_cast<std::size_t>(plan.assignment(i, j) - 1)]);
    splits.push_back({i, sorted_union(std::move(parts)), plan.folds[static_cast<std::size_t>(i)]});
  }
  return splits;
}

std::vector<SplitPair> build_kf_splits(std::span<const IndexList> folds) {
  std::size_t n = 0;
  for (const auto& f : folds) n += f.size();
  std::vector<bool> seen(n, false);
  for (const auto& f : folds)
    for (const auto idx : f) {
      if (idx >= n || seen[idx])
        throw Error(ErrorCode::InvalidPlan, "folds must be a disjoint cover of 0..n-1 (index " +
                                                std::to_string(idx) + ")");
      seen[idx] = true;
    }

  std::vector<SplitPair> splits;
  splits.reserve(folds.size());
  for (std::size_t i = 0; i < folds.size(); ++i) {
    std::vector<const IndexList*> parts;
    for (std::size_t j = 0; j < folds.size(); ++j)
      if (j != i) parts.push_back(&folds[j]);
    IndexList test(folds[i]);
    std::sort(test.begin(), test.end());
    splits.push_back({static_cast<int>(i), sorted_union(std::move(parts)), std::move(test)});
  }
  return splits;
}

std::vector<SplitPair> make_splits(Scheme scheme, std::size_t n, LabelView labels, int k,
                                   std::uint64_t seed, bool stratified, AssignmentStrategy strategy) {
  if (scheme == Scheme::IkF) return build_ikf_splits(make_plan(n, labels, k, seed, stratified, strategy));

  require_k(k);
  check_labels(labels, n, stratified);
  std::optional<std::vector<std::size_t>> counts;
  if (stratified) counts = class_counts_of(*labels);
  const auto verdict = check_kfold_feasibility(
      n, counts ? std::optional<std::span<const std::size_t>>(*counts) : std::nullopt, k, stratified);
  if (!verdict.feasible)
    throw Error(stratified ? ErrorCode::StratificationInfeasible : ErrorCode::TooFewSamples,
                verdict.message);
  const auto folds = split_folds(n, labels, k, seed, stratified);
  return build_kf_splits(folds);
}

Eigen::MatrixXd overlap_fraction(std::span<const SplitPair> splits) {
  const auto m = static_cast<Eigen::Index>(splits.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  std::size_t n = 0;
  for (const auto& s : splits) n += s.test.size();
  if (n == 0) return out;

  std::vector<IndexList> trains;
  trains.reserve(splits.size());
  for (const auto& s : splits) {
    trains.push_back(s.train);
    std::sort(trains.back().begin(), trains.back().end());
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& a = trains[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i; j < m; ++j) {
      const auto& b = trains[static_cast<std::size_t>(j)];
      std::size_t common = 0;
      auto ia = a.begin();
      auto ib = b.begin();
      while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
          ++ia;
        } else if (*ib < *ia) {
          ++ib;
        } else {
          ++common, ++ia, ++ib;
        }
      }
      out(i, j) = out(j, i) = static_cast<double>(common) / static_cast<double>(n);
    }
  }
  return out;
}

}  // namespace ikf
