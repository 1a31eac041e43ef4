#include "ikf/stats.hpp"

namespace ikf {

std::string_view to_string(DataSource source) noexcept {
  return source == DataSource::Fixed ? "fixed" : "synthetic";
}

FoldMoments fold_moments(const Eigen::MatrixXd& fold_estimates) {
  const Eigen::Index reps = fold_estimates.rows();
  const Eigen::Index k = fold_estimates.cols();
  if (reps < 2)
    throw Error(ErrorCode::InsufficientRepetitions, "moments need at least 2 repetitions");
  const auto r = static_cast<double>(reps);
  const auto kd = static_cast<double>(k);

  FoldMoments m;
  const Eigen::RowVectorXd fold_mean = fold_estimates.colwise().mean();
  const Eigen::MatrixXd centred = fold_estimates.rowwise() - fold_mean;
  const Eigen::MatrixXd scatter = centred.transpose() * centred;
  m.covariance = scatter / r;
  m.covariance = (m.covariance + m.covariance.transpose()).eval() / 2.0;
  m.covariance_sample = m.covariance * (r / (r - 1.0));
  m.fold_variance = m.covariance.diagonal();

  m.run_estimates = fold_estimates.rowwise().mean();
  m.mean_estimate = m.run_estimates.mean();
  const double run_ss = (m.run_estimates.array() - m.mean_estimate).square().sum();
  m.estimator_variance = run_ss / r;
  m.estimator_variance_sample = run_ss / (r - 1.0);
  m.variance_independent = m.covariance.trace() / (kd * kd);
  m.variance_with_cov = m.covariance.sum() / (kd * kd);

  if (k > 1) {
    const double pairs = kd * (kd - 1.0);
    m.mean_offdiag_covariance = (m.covariance.sum() - m.covariance.trace()) / pairs;
    // Per-repetition cross products; their mean is the statistic above.
    const Eigen::ArrayXd row_sum = centred.rowwise().sum();
    const Eigen::ArrayXd row_sq = centred.array().square().rowwise().sum();
    const Eigen::ArrayXd z = (row_sum.square() - row_sq) / pairs;
    const double z_var = (z - z.mean()).square().sum() / (r - 1.0);
    m.mean_offdiag_covariance_se = std::sqrt(z_var / r);
  }
  return m;
}

MseDecomposition mse_decomposition(std::span<const double> run_estimates, double reference_risk) {
  if (run_estimates.empty()) throw Error(ErrorCode::InsufficientRepetitions, "no run estimates");
  const auto r = static_cast<double>(run_estimates.size());
  double mean = 0.0;
  for (const double x : run_estimates) mean += x;
  mean /= r;

  MseDecomposition out;
  for (const double x : run_estimates) {
    out.variance += (x - mean) * (x - mean);
    out.mse += (x - reference_risk) * (x - reference_risk);
  }
  out.variance /= r;
  out.mse /= r;
  out.bias = mean - reference_risk;
  out.bias_squared = out.bias * out.bias;
  return out;
}

MseDecomposition mse_decomposition(const MonteCarloReport& report, std::optional<double> reference_risk) {
  const auto theta = reference_risk ? reference_risk : report.reference_risk;
  if (!theta) throw Error(ErrorCode::MissingReference, "MSE decomposition needs a reference risk");
  const auto& runs = report.moments.run_estimates;
  return mse_decomposition(std::span<const double>(runs.data(), static_cast<std::size_t>(runs.size())), *theta);
}

}  // namespace ikf
