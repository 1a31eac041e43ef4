// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ikf/csv.hpp"
#include "ikf/harness.hpp"
#include "ikf/partition.hpp"
#include "ikf/report.hpp"
#include "ikf/stats.hpp"
#include "ikf/synthetic.hpp"

using namespace ikf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::uint64_t suite_seed() {
  if (const char* env = std::getenv("IKF_SEED"); env && *env) return std::strtoull(env, nullptr, 10);
  return kDefaultSeed;
}

// ---------------------------------------------------------------------------

// Pairwise disjointness and exact cover, checked with per-index counters.
bool partition_ok(const std::vector<SplitPair>& splits, std::size_t n) {
  std::vector<int> in_train(n, 0), in_test(n, 0);
  for (const auto& s : splits) {
    std::set<std::size_t> tr(s.train.begin(), s.train.end());
    if (tr.size() != s.train.size()) return false;
    for (auto x : s.test)
      if (tr.count(x)) return false;
    for (auto x : s.train) {
      if (x >= n) return false;
      ++in_train[x];
    }
    for (auto x : s.test) {
      if (x >= n) return false;
      ++in_test[x];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (in_train[i] != 1 || in_test[i] != 1) return false;
  return true;
}

Outcome partition_property() {
  const auto start = Clock::now();
  SplitMix64 rng(derive_seed(suite_seed(), 1));
  const std::array<int, 4> ks = {2, 3, 5, 10};
  int violations = 0, stratified_runs = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int k = ks[rng.below(ks.size())];
    const std::size_t lo = static_cast<std::size_t>(k * (k - 1));
    const std::size_t n = lo + rng.below(5000 - lo + 1);
    const bool want_strat = rng.below(2) == 1;
    const int c = 2 + static_cast<int>(rng.below(3));
    std::vector<int> labels(n);
    for (auto& y : labels) y = static_cast<int>(rng.below(static_cast<std::uint64_t>(c)));
    const auto counts = count_classes(labels, c);
    const bool strat =
        want_strat && check_feasibility(n, std::span<const std::size_t>(counts), k, true).feasible;
    stratified_runs += strat;
    const auto splits = make_splits(Scheme::IkF, n, std::span<const int>(labels), k, rng(), strat,
                                    rng.below(2) ? AssignmentStrategy::RandomLatin
                                                 : AssignmentStrategy::CanonicalShift);
    if (splits.size() != static_cast<std::size_t>(k) || !partition_ok(splits, n)) ++violations;
  }
  const double t = seconds(start);
  return {violations == 0 && t < 10.0, "200 configs (" + std::to_string(stratified_runs) + " stratified), " +
                                           std::to_string(violations) + " violations, " + fmt(t, 3) +
                                           " s (need 0 and < 10 s)"};
}

Outcome overlap_law() {
  int bad = 0;
  std::string detail;
  for (int k : {3, 5, 10}) {
    const std::size_t n = static_cast<std::size_t>(k) * 97;
    const auto kf = make_splits(Scheme::kF, n, std::nullopt, k, suite_seed(), false);
    const auto ikf = make_splits(Scheme::IkF, n, std::nullopt, k, suite_seed(), false);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        if (i == j) continue;
        auto shared = [&](const std::vector<SplitPair>& s) {
          std::set<std::size_t> a(s[static_cast<std::size_t>(i)].train.begin(),
                                  s[static_cast<std::size_t>(i)].train.end());
          std::size_t count = 0;
          for (auto x : s[static_cast<std::size_t>(j)].train) count += a.count(x);
          return count;
        };
        // |E_i ∩ E_j| / n == (k-2)/k, compared in integers.
        if (shared(kf) * static_cast<std::size_t>(k) != static_cast<std::size_t>(k - 2) * n) ++bad;
        if (shared(ikf) != 0) ++bad;
      }
    const auto m = overlap_fraction(kf);
    detail += "k=" + std::to_string(k) + " kF " + fmt(m(0, 1), 6) + " ";
  }
  return {bad == 0, detail + "(exact (k-2)/k for kF, exact 0 for IkF), " + std::to_string(bad) + " mismatches"};
}

Outcome feasibility_boundaries() {
  const std::vector<std::size_t> balanced = {90, 90, 90};
  bool ok = check_feasibility(270, std::span<const std::size_t>(balanced), 10, true).feasible;
  int rejected = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    auto counts = balanced;
    counts[c] = 89;
    const auto v = check_feasibility(269, std::span<const std::size_t>(counts), 10, true);
    rejected += !v.feasible && v.limiting_factor == LimitingFactor::ClassSize;
  }
  ok = ok && rejected == 3;
  int unstrat = 0;
  for (int k : {2, 3, 5, 10, 20}) {
    const auto bound = static_cast<std::size_t>(k * (k - 1));
    unstrat += check_feasibility(bound, std::nullopt, k, false).feasible &&
               !check_feasibility(bound - 1, std::nullopt, k, false).feasible;
    bool threw = false;
    try {
      make_plan(bound - 1, std::nullopt, k, 1, false);
    } catch (const Error& e) {
      threw = e.code() == ErrorCode::TooFewSamples;
    }
    unstrat += threw;
    make_plan(bound, std::nullopt, k, 1, false);
  }
  ok = ok && unstrat == 10;
  return {ok, "stratified 90/90/90 accepted, 89 rejected in " + std::to_string(rejected) +
                  "/3 positions; unstratified n=k(k-1) accepted and n-1 rejected for " +
                  std::to_string(unstrat / 2) + "/5 values of k"};
}

Outcome speed_up() {
  const auto start = Clock::now();
  const auto data = generate_synthetic<double>(gaussian_blobs(2, 10), 5000, derive_seed(suite_seed(), 2));
  RunOptions options;
  options.k = 5;
  options.seed = suite_seed();
  const auto report = compare(data, options, ModelSpec{ModelKind::Knn}, 5, "blobs");
  const double t = seconds(start);
  const double s = report.speed_up.value_or(0.0);
  return {s >= 2.5 && t < 120.0, "Time_kF/Time_IkF = " + fmt(s, 3) + " (need >= 2.5; k-1 = 4), IkF " +
                                     fmt(report.ikf.total_time, 3) + " s, kF " + fmt(report.kf.total_time, 3) +
                                     " s, wall " + fmt(t, 3) + " s (need < 120 s)"};
}

Outcome banknote_parity() {
  fs::path path;
  std::string source;
  if (const char* env = std::getenv("IKF_BANKNOTE_CSV"); env && *env) {
    path = env;
    source = path.string();
  } else {
    path = fs::temp_directory_path() / "ikf_banknote_like.csv";
    write_csv(generate_synthetic<double>(banknote_like(), 1372, derive_seed(suite_seed(), 3)), path);
    source = "banknote-like surrogate";
  }
  CsvSchema schema{path};
  schema.header = !std::getenv("IKF_BANKNOTE_NO_HEADER");
  const auto data = load_csv(schema);

  bool ok = data.size() == 1372 && data.dims() == 4 && data.num_classes() == 2;
  std::string detail = source + " n=" + std::to_string(data.size()) + ":";
  RunOptions options;
  options.k = 5;
  options.seed = suite_seed();
  for (const auto& spec : {ModelSpec{ModelKind::Knn}, ModelSpec{ModelKind::GaussianNb}}) {
    const auto r = compare(data, options, spec, 10, "banknote");
    const double racc = r.r_acc.value_or(0.0), rfsc = r.r_fsc.value_or(0.0);
    ok = ok && racc >= 0.95 && racc <= 1.20 && rfsc >= 0.95 && rfsc <= 1.25;
    detail += " " + std::string(to_string(spec.kind)) + " RAcc " + fmt(racc) + " RFsc " + fmt(rfsc) + ";";
  }
  return {ok, detail + " (need RAcc in [0.95, 1.20], RFsc in [0.95, 1.25], 10 seeds)"};
}

MonteCarloConfig<double> gauss_task(Scheme scheme) {
  MonteCarloConfig<double> c;
  c.repetitions = 200;
  c.scheme = scheme;
  c.k = 5;
  c.model = ModelSpec{ModelKind::GaussianNb};
  c.generator = two_gaussian_1d(0.0, 2.0, 1.0);
  c.sample_size = 600;
  c.seed = suite_seed();
  return c;
}

double reference_at(std::size_t train_size) {
  return estimate_reference_risk<double>(two_gaussian_1d(), ModelSpec{ModelKind::GaussianNb}, train_size,
                                         kMinHoldout, derive_seed(suite_seed(), 0xBEEF), 10)
      .risk;
}

struct GaussRuns {
  MonteCarloReport ikf;
  MonteCarloReport kf;
  double theta = 0.0;
};

const GaussRuns& gauss_runs() {
  static const GaussRuns runs = [] {
    GaussRuns r;
    r.theta = reference_at(600);
    auto c = gauss_task(Scheme::IkF);
    c.reference_risk = r.theta;
    r.ikf = monte_carlo(c);
    c.scheme = Scheme::kF;
    r.kf = monte_carlo(c);
    return r;
  }();
  return runs;
}

Outcome moment_identities() {
  const auto start = Clock::now();
  const auto& runs = gauss_runs();
  double worst_rel = 0.0, worst_abs = 0.0;
  for (const auto* report : {&runs.ikf, &runs.kf}) {
    const auto& m = report->moments;
    const double k = report->k;
    const double rel = std::abs(m.estimator_variance - m.covariance.sum() / (k * k)) / m.estimator_variance;
    const double abs = std::abs(report->mse->mse - (report->mse->bias_squared + report->mse->variance));
    worst_rel = std::max(worst_rel, rel);
    worst_abs = std::max(worst_abs, abs);
  }
  const double t = seconds(start);
  return {worst_rel <= 1e-10 && worst_abs <= 1e-12 && t < 60.0,
          "R=200 NB, both schemes: Var vs 1'C1/k^2 rel err " + fmt(worst_rel, 3) + " (<= 1e-10), |MSE - Bias^2 - "
          "Var| " + fmt(worst_abs, 3) + " (<= 1e-12), " + fmt(t, 3) + " s (< 60 s)"};
}

Outcome covariance_ordering() {
  const auto& runs = gauss_runs();
  const double kf = runs.kf.moments.mean_offdiag_covariance;
  const double ikf = runs.ikf.moments.mean_offdiag_covariance;
  const double se = runs.ikf.moments.mean_offdiag_covariance_se;
  const bool ordered = kf > ikf;
  const bool near_zero = std::abs(ikf) <= 3.0 * se;
  return {ordered && near_zero, "mean off-diagonal cov kF " + fmt(kf) + " vs IkF " + fmt(ikf) + " (need kF > IkF: " +
                                    (ordered ? "yes" : "no") + "); IkF |cov| " + fmt(std::abs(ikf)) +
                                    " <= 3 SE = " + fmt(3 * se) + ": " + (near_zero ? "yes" : "no") +
                                    "; seed " + std::to_string(suite_seed())};
}

Outcome bias_direction() {
  const auto& runs = gauss_runs();
  const double small = reference_at(600 / 5), large = reference_at(600 * 4 / 5);
  const double bias_ikf = runs.ikf.mse->bias, bias_kf = runs.kf.mse->bias;
  return {bias_ikf >= bias_kf,
          "theta(n)=" + fmt(runs.theta) + ": bias IkF " + fmt(bias_ikf, 3) + " >= kF " + fmt(bias_kf, 3) +
              "; vs theta(n/k)=" + fmt(small) + " IkF " + fmt(runs.ikf.moments.mean_estimate - small, 3) +
              ", vs theta((k-1)n/k)=" + fmt(large) + " kF " + fmt(runs.kf.moments.mean_estimate - large, 3)};
}

std::string capture(const std::string& command, int& status) {
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen((command + " 2>/dev/null").c_str(), "r"), pclose);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), got);
  status = pclose(pipe.release());
  return out;
}

Outcome cli_determinism() {
  const std::string cli = IKF_CLI_PATH;
  const auto csv = fs::temp_directory_path() / "ikf_acceptance_cli.csv";
  write_csv(generate_synthetic<double>(banknote_like(), 400, 11), csv);
  const std::vector<std::string> invocations = {
      "split --n 12 --k 3 --scheme ikf --seed 7 --format json",
      "split --n 500 --k 10 --scheme kf --seed 18446744073709551615 --format json",
      "split --labels 0,0,0,0,0,0,1,1,1,1,1,1 --k 3 --stratified --assignment shift --format json",
      "check --n 269 --classes 90,90,89 --k 10 --stratified --format json",
      "run --csv " + csv.string() + " --model knn --scheme kf --seed 3 --format json",
      "run --synthetic blobs --n 800 --model nb --parallel on --seed 4 --format json",
      "compare --csv " + csv.string() + " --model knn --repeats 3 --seed 5 --format json",
      "montecarlo --synthetic gauss1d --n 200 --reps 20 --reference 0.16 --seed 6 --format json",
      "montecarlo --csv " + csv.string() + " --mode fixed --reps 10 --scheme kf --seed 6 --format json",
      "sweep --synthetic gauss1d --n 100 --reps 5 --k-values 2,5 --reference 0.16 --seed 8 --format json",
  };
  int identical = 0;
  std::string first_bad;
  for (const auto& args : invocations) {
    int s1 = 0, s2 = 0;
    const auto a = capture(cli + " " + args, s1);
    const auto b = capture(cli + " " + args, s2);
    bool same = s1 == s2 && !a.empty();
    if (same) same = strip_timing(json::parse(a)).dump() == strip_timing(json::parse(b)).dump();
    identical += same;
    if (!same && first_bad.empty()) first_bad = args;
  }
  return {identical == static_cast<int>(invocations.size()),
          std::to_string(identical) + "/" + std::to_string(invocations.size()) +
              " invocations byte-identical after removing timing keys" +
              (first_bad.empty() ? "" : "; first mismatch: " + first_bad)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"partition-property", partition_property},
      {"overlap-law", overlap_law},
      {"feasibility-boundaries", feasibility_boundaries},
      {"speed-up", speed_up},
      {"banknote-parity", banknote_parity},
      {"moment-identities", moment_identities},
      {"covariance-ordering", covariance_ordering},
      {"bias-direction", bias_direction},
      {"cli-determinism", cli_determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
