#include "ikf/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ikf/error.hpp"

namespace ikf {

void SyntheticGenerator::validate() const {
  if (classes.empty()) throw Error(ErrorCode::InvalidSpec, "generator has no classes");
  if (priors.size() != classes.size())
    throw Error(ErrorCode::InvalidSpec, "generator needs one prior per class");
  const Eigen::Index d = dims();
  if (d < 1) throw Error(ErrorCode::InvalidSpec, "generator needs at least one feature");
  for (const auto& c : classes) {
    if (c.mean.size() != d || c.stddev.size() != d)
      throw Error(ErrorCode::InvalidSpec, "every class needs a mean and a stddev per feature");
    if (!(c.stddev.array() > 0.0).all() || !c.mean.allFinite() || !c.stddev.allFinite())
      throw Error(ErrorCode::InvalidSpec, "class spreads must be finite and positive");
  }
  double total = 0.0;
  for (const double p : priors) {
    if (!(p >= 0.0)) throw Error(ErrorCode::InvalidSpec, "priors must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::InvalidSpec, "priors must sum to 1");
}

SyntheticGenerator two_gaussian_1d(double mean0, double mean1, double sd) {
  SyntheticGenerator gen;
  gen.name = "gauss1d";
  gen.classes = {{Eigen::VectorXd::Constant(1, mean0), Eigen::VectorXd::Constant(1, sd)},
                 {Eigen::VectorXd::Constant(1, mean1), Eigen::VectorXd::Constant(1, sd)}};
  gen.priors = {0.5, 0.5};
  // Equal priors and spreads: the optimal threshold is the midpoint.
  gen.analytic_bayes_error = 0.5 * std::erfc(std::abs(mean1 - mean0) / (2.0 * sd) / std::sqrt(2.0));
  return gen;
}

SyntheticGenerator gaussian_blobs(int classes, int dims, double separation, double sd) {
  if (classes < 1 || dims < 1) throw Error(ErrorCode::InvalidSpec, "blobs need >= 1 class and dimension");
  SyntheticGenerator gen;
  gen.name = "blobs";
  for (int c = 0; c < classes; ++c) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dims);
    mean(c % dims) = ((c / dims) % 2 == 0 ? 1.0 : -1.0) * separation;
    gen.classes.push_back({std::move(mean), Eigen::VectorXd::Constant(dims, sd)});
  }
  gen.priors.assign(static_cast<std::size_t>(classes), 1.0 / classes);
  return gen;
}

SyntheticGenerator banknote_like() {
  SyntheticGenerator gen;
  gen.name = "banknote-like";
  Eigen::VectorXd mean0(4), sd0(4), mean1(4), sd1(4);
  mean0 << 2.277, 4.257, 0.797, -1.147;
  sd0 << 2.019, 5.139, 3.239, 2.125;
  mean1 << -1.868, -0.994, 2.149, -1.247;
  sd1 << 1.881, 5.405, 5.262, 2.070;
  gen.classes = {{mean0, sd0}, {mean1, sd1}};
  gen.priors = {762.0 / 1372.0, 610.0 / 1372.0};
  return gen;
}

std::vector<std::size_t> allocate_counts(const std::vector<double>& priors, std::size_t n) {
  std::vector<std::size_t> counts(priors.size(), 0);
  std::vector<double> remainder(priors.size(), 0.0);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < priors.size(); ++c) {
    const double exact = priors[c] * static_cast<double>(n);
    counts[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - static_cast<double>(counts[c]);
    assigned += counts[c];
  }
  std::vector<std::size_t> order(priors.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < n && i < order.size(); ++i, ++assigned) ++counts[order[i]];
  return counts;
}

}  // namespace ikf
