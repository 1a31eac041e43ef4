#include "ikf/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace ikf {

NLOHMANN_JSON_SERIALIZE_ENUM(Scheme, {{Scheme::IkF, "IkF"}, {Scheme::kF, "kF"}})
NLOHMANN_JSON_SERIALIZE_ENUM(AssignmentStrategy, {{AssignmentStrategy::CanonicalShift, "shift"},
                                                  {AssignmentStrategy::RandomLatin, "latin"}})
NLOHMANN_JSON_SERIALIZE_ENUM(LimitingFactor, {{LimitingFactor::TotalSize, "TotalSize"},
                                              {LimitingFactor::ClassSize, "ClassSize"}})
NLOHMANN_JSON_SERIALIZE_ENUM(MetricKind, {{MetricKind::Accuracy, "accuracy"},
                                          {MetricKind::FScoreMacro, "f1_macro"},
                                          {MetricKind::FScoreBinary, "f1_binary"}})
NLOHMANN_JSON_SERIALIZE_ENUM(DataSource, {{DataSource::Fixed, "fixed"}, {DataSource::Synthetic, "synthetic"}})

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(j.front().size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(i, c) = j.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(c)).get<double>();
  return m;
}

json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

json with_header(std::string_view kind, json payload) {
  json doc = {{"schema_version", kSchemaVersion}, {"kind", kind}};
  doc.update(payload);
  return doc;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string opt_fixed(const std::optional<double>& v, int digits) {
  return v ? fixed(*v, digits) : "-";
}

std::string index_list(const IndexList& idx) {
  std::string out;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(idx[i]);
  }
  return out;
}

// Markdown table with columns padded to equal width.
std::string table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = std::max<std::size_t>(3, header[c].size());
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) width[c] = std::max(width[c], row[c].size());

  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& cells) {
    out << '|';
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string& cell = c < cells.size() ? cells[c] : std::string{};
      out << ' ' << cell << std::string(width[c] - cell.size(), ' ') << " |";
    }
    out << '\n';
  };
  emit(header);
  out << '|';
  for (const auto w : width) out << ' ' << std::string(w, '-') << " |";
  out << '\n';
  for (const auto& row : rows) emit(row);
  return out.str();
}

std::string metric_header(MetricKind kind) {
  switch (kind) {
    case MetricKind::Accuracy: return "Acc";
    case MetricKind::FScoreMacro: return "Fsc";
    case MetricKind::FScoreBinary: return "Fsc(bin)";
  }
  return "?";
}

std::optional<double> fscore_of(const SchemeSummary& s) {
  if (auto v = s.mean(MetricKind::FScoreMacro)) return v;
  return s.mean(MetricKind::FScoreBinary);
}

}  // namespace

json strip_timing(json doc) {
  if (doc.is_object()) {
    for (const auto key : kTimingKeys) doc.erase(std::string(key));
    for (auto& [key, value] : doc.items()) value = strip_timing(std::move(value));
  } else if (doc.is_array()) {
    for (auto& value : doc) value = strip_timing(std::move(value));
  }
  return doc;
}

void to_json(json& j, const MetricValue& v) { j = {{"name", v.name}, {"value", v.value}}; }

void from_json(const json& j, MetricValue& v) {
  j.at("name").get_to(v.name);
  j.at("value").get_to(v.value);
}

void to_json(json& j, const SplitPair& s) {
  j = {{"iteration", s.iteration}, {"train", s.train}, {"test", s.test}};
}

void from_json(const json& j, SplitPair& s) {
  j.at("iteration").get_to(s.iteration);
  j.at("train").get_to(s.train);
  j.at("test").get_to(s.test);
}

void to_json(json& j, const FeasibilityVerdict& v) {
  j = {{"feasible", v.feasible},
       {"required_minimum", v.required_minimum},
       {"limiting_factor", v.limiting_factor},
       {"message", v.message}};
}

void from_json(const json& j, FeasibilityVerdict& v) {
  j.at("feasible").get_to(v.feasible);
  j.at("required_minimum").get_to(v.required_minimum);
  j.at("limiting_factor").get_to(v.limiting_factor);
  j.at("message").get_to(v.message);
}

void to_json(json& j, const FoldReport& r) {
  j = {{"iteration", r.iteration},     {"metrics", r.metric_values},
       {"train_size", r.train_size},   {"test_size", r.test_size},
       {"fit_time", r.fit_time},       {"predict_time", r.predict_time}};
}

void from_json(const json& j, FoldReport& r) {
  j.at("iteration").get_to(r.iteration);
  j.at("metrics").get_to(r.metric_values);
  j.at("train_size").get_to(r.train_size);
  j.at("test_size").get_to(r.test_size);
  j.at("fit_time").get_to(r.fit_time);
  j.at("predict_time").get_to(r.predict_time);
}

void to_json(json& j, const EvaluationReport& r) {
  j = {{"scheme", r.scheme},       {"k", r.k},
       {"seed", r.seed},           {"stratified", r.stratified},
       {"assignment", r.strategy}, {"model", r.model},
       {"folds", r.folds},         {"mean_metrics", r.mean_metrics},
       {"total_time", r.total_time}};
}

void from_json(const json& j, EvaluationReport& r) {
  j.at("scheme").get_to(r.scheme);
  j.at("k").get_to(r.k);
  j.at("seed").get_to(r.seed);
  j.at("stratified").get_to(r.stratified);
  j.at("assignment").get_to(r.strategy);
  j.at("model").get_to(r.model);
  j.at("folds").get_to(r.folds);
  j.at("mean_metrics").get_to(r.mean_metrics);
  j.at("total_time").get_to(r.total_time);
}

void to_json(json& j, const SchemeSummary& s) {
  j = {{"scheme", s.scheme}, {"mean_metrics", s.mean_metrics}, {"total_time", s.total_time}, {"runs", s.runs}};
}

void from_json(const json& j, SchemeSummary& s) {
  j.at("scheme").get_to(s.scheme);
  j.at("mean_metrics").get_to(s.mean_metrics);
  j.at("total_time").get_to(s.total_time);
  j.at("runs").get_to(s.runs);
}

void to_json(json& j, const ComparisonReport& r) {
  j = {{"dataset", r.dataset},
       {"samples", r.samples},
       {"variables", r.variables},
       {"classes", r.classes},
       {"k", r.k},
       {"seed", r.seed},
       {"repeats", r.repeats},
       {"model", r.model},
       {"ikf", r.ikf},
       {"kf", r.kf},
       {"ratios", {{"r_acc", optional_json(r.r_acc)},
                   {"r_fsc", optional_json(r.r_fsc)},
                   {"speed_up", optional_json(r.speed_up)}}}};
}

void from_json(const json& j, ComparisonReport& r) {
  j.at("dataset").get_to(r.dataset);
  j.at("samples").get_to(r.samples);
  j.at("variables").get_to(r.variables);
  j.at("classes").get_to(r.classes);
  j.at("k").get_to(r.k);
  j.at("seed").get_to(r.seed);
  j.at("repeats").get_to(r.repeats);
  j.at("model").get_to(r.model);
  j.at("ikf").get_to(r.ikf);
  j.at("kf").get_to(r.kf);
  const auto& ratios = j.at("ratios");
  r.r_acc = optional_from<double>(ratios, "r_acc");
  r.r_fsc = optional_from<double>(ratios, "r_fsc");
  r.speed_up = optional_from<double>(ratios, "speed_up");
}

void to_json(json& j, const MseDecomposition& m) {
  j = {{"bias", m.bias}, {"bias_squared", m.bias_squared}, {"variance", m.variance}, {"mse", m.mse}};
}

void from_json(const json& j, MseDecomposition& m) {
  j.at("bias").get_to(m.bias);
  j.at("bias_squared").get_to(m.bias_squared);
  j.at("variance").get_to(m.variance);
  j.at("mse").get_to(m.mse);
}

void to_json(json& j, const FoldMoments& m) {
  j = {{"run_estimates", vector_json(m.run_estimates)},
       {"fold_variance", vector_json(m.fold_variance)},
       {"covariance", matrix_json(m.covariance)},
       {"covariance_sample", matrix_json(m.covariance_sample)},
       {"mean_estimate", m.mean_estimate},
       {"estimator_variance", m.estimator_variance},
       {"estimator_variance_sample", m.estimator_variance_sample},
       {"variance_independent", m.variance_independent},
       {"variance_with_cov", m.variance_with_cov},
       {"mean_offdiag_covariance", m.mean_offdiag_covariance},
       {"mean_offdiag_covariance_se", m.mean_offdiag_covariance_se}};
}

void from_json(const json& j, FoldMoments& m) {
  m.run_estimates = vector_from(j.at("run_estimates"));
  m.fold_variance = vector_from(j.at("fold_variance"));
  m.covariance = matrix_from(j.at("covariance"));
  m.covariance_sample = matrix_from(j.at("covariance_sample"));
  j.at("mean_estimate").get_to(m.mean_estimate);
  j.at("estimator_variance").get_to(m.estimator_variance);
  j.at("estimator_variance_sample").get_to(m.estimator_variance_sample);
  j.at("variance_independent").get_to(m.variance_independent);
  j.at("variance_with_cov").get_to(m.variance_with_cov);
  j.at("mean_offdiag_covariance").get_to(m.mean_offdiag_covariance);
  j.at("mean_offdiag_covariance_se").get_to(m.mean_offdiag_covariance_se);
}

void to_json(json& j, const MonteCarloReport& r) {
  j = {{"scheme", r.scheme},
       {"k", r.k},
       {"repetitions", r.repetitions},
       {"metric", r.metric},
       {"data_source", r.source},
       {"sample_size", r.sample_size},
       {"seed", r.seed},
       {"model", r.model},
       {"estimand", "loss = 1 - metric"},
       {"fold_estimates", matrix_json(r.fold_estimates)},
       {"moments", r.moments},
       {"training_uses", {{"min", r.training_uses_min}, {"max", r.training_uses_max}}},
       {"reference_risk", optional_json(r.reference_risk)},
       {"reference_note", r.reference_note},
       {"mse", r.mse ? json(*r.mse) : json(nullptr)}};
}

void from_json(const json& j, MonteCarloReport& r) {
  j.at("scheme").get_to(r.scheme);
  j.at("k").get_to(r.k);
  j.at("repetitions").get_to(r.repetitions);
  j.at("metric").get_to(r.metric);
  j.at("data_source").get_to(r.source);
  j.at("sample_size").get_to(r.sample_size);
  j.at("seed").get_to(r.seed);
  j.at("model").get_to(r.model);
  r.fold_estimates = matrix_from(j.at("fold_estimates"));
  j.at("moments").get_to(r.moments);
  j.at("training_uses").at("min").get_to(r.training_uses_min);
  j.at("training_uses").at("max").get_to(r.training_uses_max);
  r.reference_risk = optional_from<double>(j, "reference_risk");
  j.at("reference_note").get_to(r.reference_note);
  r.mse = optional_from<MseDecomposition>(j, "mse");
}

void to_json(json& j, const TradeOffRow& r) {
  j = {{"scheme", r.scheme},
       {"k", r.k},
       {"mean_estimate", r.mean_estimate},
       {"bias", r.bias},
       {"var_indep", r.variance_independent},
       {"var_cov", r.variance_with_cov},
       {"mse", r.mse}};
}

void from_json(const json& j, TradeOffRow& r) {
  j.at("scheme").get_to(r.scheme);
  j.at("k").get_to(r.k);
  j.at("mean_estimate").get_to(r.mean_estimate);
  j.at("bias").get_to(r.bias);
  j.at("var_indep").get_to(r.variance_independent);
  j.at("var_cov").get_to(r.variance_with_cov);
  j.at("mse").get_to(r.mse);
}

void to_json(json& j, const TradeOffTable& t) {
  j = {{"reference_risk", t.reference_risk}, {"reference_note", t.reference_note}, {"rows", t.rows}};
}

void from_json(const json& j, TradeOffTable& t) {
  j.at("reference_risk").get_to(t.reference_risk);
  j.at("reference_note").get_to(t.reference_note);
  j.at("rows").get_to(t.rows);
}

json split_document(const SplitRequest& request, std::span<const SplitPair> splits, const PartitionPlan* plan) {
  json payload = {{"scheme", request.scheme},
                  {"n", request.n},
                  {"k", request.k},
                  {"seed", request.seed},
                  {"stratified", request.stratified},
                  {"assignment", request.strategy},
                  {"splits", json(std::vector<SplitPair>(splits.begin(), splits.end()))}};
  if (plan) {
    json assignment = json::array();
    for (Eigen::Index i = 0; i < plan->assignment.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index c = 0; c < plan->assignment.cols(); ++c) row.push_back(plan->assignment(i, c));
      assignment.push_back(std::move(row));
    }
    payload["plan"] = {{"folds", plan->folds}, {"subfolds", plan->subfolds}, {"assignment", assignment}};
  }
  return with_header("split", std::move(payload));
}

json feasibility_document(std::size_t n, int k, bool stratified, const FeasibilityVerdict& verdict) {
  return with_header("feasibility", {{"n", n}, {"k", k}, {"stratified", stratified}, {"verdict", verdict}});
}

json evaluation_document(const EvaluationReport& report) { return with_header("evaluation", report); }

json comparison_document(const ComparisonReport& report) { return with_header("comparison", report); }

json montecarlo_document(const MonteCarloReport& report) { return with_header("montecarlo", report); }

json sweep_document(const TradeOffTable& table) { return with_header("sweep", table); }

std::vector<SplitPair> splits_from_document(const json& doc) {
  return doc.at("splits").get<std::vector<SplitPair>>();
}

std::string split_markdown(const SplitRequest& request, std::span<const SplitPair> splits) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : splits)
    rows.push_back({std::to_string(s.iteration), std::to_string(s.train.size()), std::to_string(s.test.size()),
                    index_list(s.train), index_list(s.test)});
  return std::string(to_string(request.scheme)) + " split, n=" + std::to_string(request.n) +
         ", k=" + std::to_string(request.k) + ", seed=" + std::to_string(request.seed) + "\n\n" +
         table({"Iteration", "Train size", "Test size", "Train", "Test"}, rows);
}

std::string feasibility_markdown(std::size_t n, int k, bool stratified, const FeasibilityVerdict& verdict) {
  return table({"n", "k", "Stratified", "Feasible", "Required minimum", "Limiting factor", "Message"},
               {{std::to_string(n), std::to_string(k), stratified ? "yes" : "no", verdict.feasible ? "yes" : "no",
                 std::to_string(verdict.required_minimum), std::string(to_string(verdict.limiting_factor)),
                 verdict.message}});
}

std::string evaluation_markdown(const EvaluationReport& report) {
  std::vector<std::string> header = {"Fold", "Train size", "Test size"};
  for (const auto& m : report.mean_metrics) header.push_back(metric_header(m.name));
  header.insert(header.end(), {"Fit (s)", "Predict (s)"});

  std::vector<std::vector<std::string>> rows;
  for (const auto& f : report.folds) {
    std::vector<std::string> row = {std::to_string(f.iteration), std::to_string(f.train_size),
                                    std::to_string(f.test_size)};
    for (const auto& m : f.metric_values) row.push_back(fixed(m.value, 4));
    row.push_back(fixed(f.fit_time, 4));
    row.push_back(fixed(f.predict_time, 4));
    rows.push_back(std::move(row));
  }
  std::vector<std::string> mean = {"mean", "", ""};
  for (const auto& m : report.mean_metrics) mean.push_back(fixed(m.value, 4));
  mean.push_back("total");
  mean.push_back(fixed(report.total_time, 4));
  rows.push_back(std::move(mean));
  return std::string(to_string(report.scheme)) + ", k=" + std::to_string(report.k) + ", model " + report.model +
         ", seed " + std::to_string(report.seed) + "\n\n" + table(header, rows);
}

std::string comparison_markdown(const ComparisonReport& r) {
  return table({"Dataset", "#s", "#v", "#c", "IkF Acc", "IkF Fsc", "IkF Time", "kF Acc", "kF Fsc", "kF Time",
                "RAcc", "RFsc", "Speed-up"},
               {{r.dataset, std::to_string(r.samples), std::to_string(r.variables), std::to_string(r.classes),
                 opt_fixed(r.ikf.mean(MetricKind::Accuracy), 3), opt_fixed(fscore_of(r.ikf), 3),
                 fixed(r.ikf.total_time, 2), opt_fixed(r.kf.mean(MetricKind::Accuracy), 3),
                 opt_fixed(fscore_of(r.kf), 3), fixed(r.kf.total_time, 2), opt_fixed(r.r_acc, 3),
                 opt_fixed(r.r_fsc, 3), opt_fixed(r.speed_up, 2)}});
}

std::string montecarlo_markdown(const MonteCarloReport& r) {
  const auto& m = r.moments;
  std::vector<std::vector<std::string>> rows = {
      {"scheme", std::string(to_string(r.scheme))},
      {"k", std::to_string(r.k)},
      {"repetitions", std::to_string(r.repetitions)},
      {"data source", std::string(to_string(r.source))},
      {"sample size", std::to_string(r.sample_size)},
      {"model", r.model},
      {"mean loss estimate", general(m.mean_estimate)},
      {"Var(estimate)", general(m.estimator_variance)},
      {"(1/k^2) sum Var(fold)", general(m.variance_independent)},
      {"(1/k^2) sum Cov (all pairs)", general(m.variance_with_cov)},
      {"mean off-diagonal Cov", general(m.mean_offdiag_covariance)},
      {"  standard error", general(m.mean_offdiag_covariance_se)},
      {"training uses per sample", std::to_string(r.training_uses_min) + ".." + std::to_string(r.training_uses_max)},
  };
  if (r.reference_risk) rows.push_back({"reference risk", general(*r.reference_risk)});
  if (r.mse) {
    rows.push_back({"bias", general(r.mse->bias)});
    rows.push_back({"MSE", general(r.mse->mse)});
  }
  return table({"Statistic", "Value"}, rows);
}

std::string sweep_markdown(const TradeOffTable& t) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : t.rows)
    rows.push_back({std::string(to_string(r.scheme)), std::to_string(r.k), general(r.bias),
                    general(r.variance_independent), general(r.variance_with_cov), general(r.mse)});
  return "reference risk " + general(t.reference_risk) + " (" + t.reference_note + ")\n\n" +
         table({"Scheme", "k", "Bias", "Var (indep)", "Var (with cov)", "MSE"}, rows);
}

std::string sweep_csv(const TradeOffTable& t) {
  std::ostringstream out;
  out << "scheme,k,bias,var_indep,var_cov,mse\n";
  out.precision(17);
  for (const auto& r : t.rows)
    out << to_string(r.scheme) << ',' << r.k << ',' << r.bias << ',' << r.variance_independent << ','
        << r.variance_with_cov << ',' << r.mse << '\n';
  return out.str();
}

}  // namespace ikf
