#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ikf/harness.hpp"
#include "ikf/partition.hpp"
#include "ikf/stats.hpp"

namespace ikf {

using json = nlohmann::json;

/// Bumped on any incompatible change to the documents below.
inline constexpr int kSchemaVersion = 1;

/// Keys holding wall-clock measurements (or ratios of them). Everything else
/// in a document is a deterministic function of the inputs.
inline constexpr std::string_view kTimingKeys[] = {"fit_time", "predict_time", "total_time", "speed_up"};

/// Copy of `doc` with every timing key removed, at any depth.
json strip_timing(json doc);

void to_json(json& j, const MetricValue& v);
void from_json(const json& j, MetricValue& v);
void to_json(json& j, const SplitPair& s);
void from_json(const json& j, SplitPair& s);
void to_json(json& j, const FeasibilityVerdict& v);
void from_json(const json& j, FeasibilityVerdict& v);
void to_json(json& j, const FoldReport& r);
void from_json(const json& j, FoldReport& r);
void to_json(json& j, const EvaluationReport& r);
void from_json(const json& j, EvaluationReport& r);
void to_json(json& j, const SchemeSummary& s);
void from_json(const json& j, SchemeSummary& s);
void to_json(json& j, const ComparisonReport& r);
void from_json(const json& j, ComparisonReport& r);
void to_json(json& j, const MseDecomposition& m);
void from_json(const json& j, MseDecomposition& m);
void to_json(json& j, const FoldMoments& m);
void from_json(const json& j, FoldMoments& m);
void to_json(json& j, const MonteCarloReport& r);
void from_json(const json& j, MonteCarloReport& r);
void to_json(json& j, const TradeOffRow& r);
void from_json(const json& j, TradeOffRow& r);
void to_json(json& j, const TradeOffTable& t);
void from_json(const json& j, TradeOffTable& t);

struct SplitRequest {
  Scheme scheme = Scheme::IkF;
  std::size_t n = 0;
  int k = 5;
  std::uint64_t seed = 0;
  bool stratified = false;
  AssignmentStrategy strategy = AssignmentStrategy::RandomLatin;
};

/// Top-level documents: {"schema_version", "kind", ...payload}.
json split_document(const SplitRequest& request, std::span<const SplitPair> splits,
                    const PartitionPlan* plan = nullptr);
json feasibility_document(std::size_t n, int k, bool stratified, const FeasibilityVerdict& verdict);
json evaluation_document(const EvaluationReport& report);
json comparison_document(const ComparisonReport& report);
json montecarlo_document(const MonteCarloReport& report);
json sweep_document(const TradeOffTable& table);

/// Splits from a split document (inverse of split_document for the pairs).
std::vector<SplitPair> splits_from_document(const json& doc);

std::string split_markdown(const SplitRequest& request, std::span<const SplitPair> splits);
std::string feasibility_markdown(std::size_t n, int k, bool stratified, const FeasibilityVerdict& verdict);
std::string evaluation_markdown(const EvaluationReport& report);
/// One comparison-table row: Acc/Fsc/Time per scheme then RAcc/RFsc/Speed-up.
std::string comparison_markdown(const ComparisonReport& report);
std::string montecarlo_markdown(const MonteCarloReport& report);
std::string sweep_markdown(const TradeOffTable& table);
/// Plot data: scheme,k,bias,var_indep,var_cov,mse
std::string sweep_csv(const TradeOffTable& table);

}  // namespace ikf
