#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ikf/dataset.hpp"
#include "ikf/rng.hpp"

namespace ikf {

/// Axis-aligned Gaussian class-conditional density.
struct GaussianClass {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;  // diagonal covariance, all entries > 0
};

/// Mixture of Gaussian blobs: the data distribution for synthetic experiments.
struct SyntheticGenerator {
  std::string name = "blobs";
  std::vector<GaussianClass> classes;
  std::vector<double> priors;
  std::uint64_t seed = 0;
  std::optional<double> analytic_bayes_error;

  int num_classes() const noexcept { return static_cast<int>(classes.size()); }
  Eigen::Index dims() const noexcept { return classes.empty() ? 0 : classes.front().mean.size(); }

  /// Throws InvalidSpec on empty/ragged classes, non-positive spreads or
  /// priors that are negative or do not sum to 1.
  void validate() const;
};

/// Two 1-D classes N(mean0, sd²) and N(mean1, sd²) with equal priors.
/// Bayes error is Phi(-|mean1 - mean0| / (2 sd)).
SyntheticGenerator two_gaussian_1d(double mean0 = 0.0, double mean1 = 2.0, double sd = 1.0);

/// `classes` isotropic blobs in `dims` dimensions. Class c is centred at
/// separation * e_(c mod dims), negated on every second wrap-around.
SyntheticGenerator gaussian_blobs(int classes, int dims, double separation = 2.0, double sd = 1.0);

/// Four-feature, two-class surrogate with the per-class means and spreads of
/// the banknote-authentication data (762 genuine / 610 forged).
SyntheticGenerator banknote_like();

/// Largest-remainder rounding of n * priors; ties go to the lower class.
std::vector<std::size_t> allocate_counts(const std::vector<double>& priors, std::size_t n);

/// Deterministic per seed. Class counts follow allocate_counts; rows are
/// shuffled so class order carries no information.
template <typename Scalar = double>
Dataset<Scalar> generate_synthetic(const SyntheticGenerator& gen, std::size_t n, std::uint64_t seed) {
  gen.validate();
  const auto counts = allocate_counts(gen.priors, n);
  const Eigen::Index d = gen.dims();

  std::vector<int> labels;
  labels.reserve(n);
  for (std::size_t c = 0; c < counts.size(); ++c) labels.insert(labels.end(), counts[c], static_cast<int>(c));
  SplitMix64 rng(seed);
  shuffle(std::span<int>(labels), rng);

  FeatureMatrix<Scalar> features(static_cast<Eigen::Index>(n), d);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& cls = gen.classes[static_cast<std::size_t>(labels[r])];
    for (Eigen::Index j = 0; j < d; ++j)
      features(static_cast<Eigen::Index>(r), j) = static_cast<Scalar>(cls.mean(j) + cls.stddev(j) * rng.normal());
  }
  return Dataset<Scalar>(std::move(features), std::move(labels), gen.num_classes());
}

template <typename Scalar = double>
Dataset<Scalar> generate_synthetic(const SyntheticGenerator& gen, std::size_t n) {
  return generate_synthetic<Scalar>(gen, n, gen.seed);
}

}  // namespace ikf
