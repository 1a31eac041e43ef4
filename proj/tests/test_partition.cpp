#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "ikf/error.hpp"
#include "ikf/partition.hpp"
#include "ikf/rng.hpp"

using namespace ikf;

namespace {

std::set<std::size_t> as_set(const IndexList& v) { return {v.begin(), v.end()}; }

std::size_t intersection_size(const IndexList& a, const IndexList& b) {
  const auto sa = as_set(a);
  return static_cast<std::size_t>(std::count_if(b.begin(), b.end(), [&](auto x) { return sa.count(x) > 0; }));
}

// Every index in [0, n) is covered exactly once by `parts`.
bool exact_cover(const std::vector<IndexList>& parts, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const auto& p : parts)
    for (auto x : p) {
      if (x >= n) return false;
      ++seen[x];
    }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

std::vector<IndexList> trains(const std::vector<SplitPair>& s) {
  std::vector<IndexList> out;
  for (const auto& p : s) out.push_back(p.train);
  return out;
}

std::vector<IndexList> tests(const std::vector<SplitPair>& s) {
  std::vector<IndexList> out;
  for (const auto& p : s) out.push_back(p.test);
  return out;
}

std::vector<int> blocks(std::initializer_list<std::pair<int, int>> spec) {
  std::vector<int> out;
  for (auto [label, count] : spec) out.insert(out.end(), static_cast<std::size_t>(count), label);
  return out;
}

}  // namespace

TEST_CASE("rng streams are deterministic and distinct") {
  SplitMix64 a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));

  SplitMix64 r(7);
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 5000; ++i) ++hits[r.below(5)];
  for (int h : hits) CHECK(h > 800);
}

TEST_CASE("split_folds sizes and cover") {
  SUBCASE("n=10, k=5") {
    const auto folds = split_folds(10, std::nullopt, 5, 0, false);
    REQUIRE(folds.size() == 5);
    for (const auto& f : folds) CHECK(f.size() == 2);
    CHECK(exact_cover(folds, 10));
  }
  SUBCASE("n=11, k=3 gives {4,4,3}") {
    const auto folds = split_folds(11, std::nullopt, 3, 5, false);
    std::multiset<std::size_t> sizes;
    for (const auto& f : folds) sizes.insert(f.size());
    // 11 = 3*3 + 2: two folds take one extra index.
    CHECK(sizes == std::multiset<std::size_t>{3, 4, 4});
    CHECK(folds[0].size() == 4);
    CHECK(folds[1].size() == 4);
    CHECK(exact_cover(folds, 11));
  }
  SUBCASE("stratified 6+6, k=3 gives two of each class per fold") {
    const auto labels = blocks({{0, 6}, {1, 6}});
    const auto folds = split_folds(12, std::span<const int>(labels), 3, 9, true);
    for (const auto& f : folds) {
      CHECK(std::count_if(f.begin(), f.end(), [&](auto i) { return labels[i] == 0; }) == 2);
      CHECK(std::count_if(f.begin(), f.end(), [&](auto i) { return labels[i] == 1; }) == 2);
    }
  }
  SUBCASE("stratified class counts differ by at most one across folds") {
    const auto labels = blocks({{0, 17}, {1, 9}, {2, 23}});
    const auto folds = split_folds(labels.size(), std::span<const int>(labels), 4, 3, true);
    CHECK(exact_cover(folds, labels.size()));
    for (int c = 0; c < 3; ++c) {
      std::vector<long> per;
      for (const auto& f : folds)
        per.push_back(std::count_if(f.begin(), f.end(), [&](auto i) { return labels[i] == c; }));
      CHECK(*std::max_element(per.begin(), per.end()) - *std::min_element(per.begin(), per.end()) <= 1);
    }
    std::vector<std::size_t> sizes;
    for (const auto& f : folds) sizes.push_back(f.size());
    CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
  }
  SUBCASE("folds are sorted and seed dependent") {
    const auto a = split_folds(50, std::nullopt, 5, 1, false);
    const auto b = split_folds(50, std::nullopt, 5, 2, false);
    for (const auto& f : a) CHECK(std::is_sorted(f.begin(), f.end()));
    CHECK(a != b);
    CHECK(a == split_folds(50, std::nullopt, 5, 1, false));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(split_folds(3, std::nullopt, 5, 0, false), Error);
    const auto labels = blocks({{0, 10}, {1, 2}});
    try {
      split_folds(12, std::span<const int>(labels), 3, 0, true);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::StratificationInfeasible);
    }
  }
}

TEST_CASE("split_subfolds") {
  const IndexList four = {3, 8, 11, 20};
  const auto two = split_subfolds(four, 2, std::nullopt, 0, false);
  REQUIRE(two.size() == 2);
  CHECK(two[0].size() == 2);
  CHECK(two[1].size() == 2);
  std::set<std::size_t> merged;
  for (const auto& s : two) merged.insert(s.begin(), s.end());
  CHECK(merged == as_set(four));

  const IndexList five = {0, 1, 2, 3, 4};
  const auto odd = split_subfolds(five, 2, std::nullopt, 0, false);
  CHECK(odd[0].size() == 3);
  CHECK(odd[1].size() == 2);

  // Labels are indexed by sample index.
  std::vector<int> labels(10, -1);
  labels[1] = 0;
  labels[4] = 0;
  labels[6] = 1;
  labels[9] = 1;
  const IndexList fold = {1, 4, 6, 9};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto parts = split_subfolds(fold, 2, std::span<const int>(labels), seed, true);
    for (const auto& p : parts) {
      REQUIRE(p.size() == 2);
      CHECK(labels[p[0]] != labels[p[1]]);
    }
  }
}

TEST_CASE("assignment matrices") {
  SUBCASE("k=2") {
    for (auto strategy : {AssignmentStrategy::CanonicalShift, AssignmentStrategy::RandomLatin}) {
      const auto a = assign_subfolds(2, strategy, 11);
      CHECK(a(0, 1) == 1);
      CHECK(a(1, 0) == 1);
    }
  }
  SUBCASE("k=3 shift columns are (1,2)") {
    const auto a = assign_subfolds(3, AssignmentStrategy::CanonicalShift, 0);
    for (int j = 0; j < 3; ++j) {
      std::vector<int> column;
      for (int i = 0; i < 3; ++i)
        if (i != j) column.push_back(a(i, j));
      CHECK(column == std::vector<int>{1, 2});
      CHECK(a(j, j) == 0);
    }
  }
  SUBCASE("random latin columns are permutations") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto a = assign_subfolds(5, AssignmentStrategy::RandomLatin, seed);
      for (int j = 0; j < 5; ++j) {
        std::set<int> column;
        for (int i = 0; i < 5; ++i)
          if (i != j) column.insert(a(i, j));
        CHECK(column == std::set<int>{1, 2, 3, 4});
      }
      CHECK_NOTHROW(validate_assignment(a, 5));
    }
  }
  SUBCASE("validation rejects repeated entries") {
    auto a = assign_subfolds(4, AssignmentStrategy::CanonicalShift, 0);
    a(1, 0) = a(2, 0);
    CHECK_THROWS_AS(validate_assignment(a, 4), Error);
  }
}

TEST_CASE("IkF splits satisfy the set equations") {
  SUBCASE("k=3, n=12") {
    const auto plan = make_plan(12, std::nullopt, 3, 4, false, AssignmentStrategy::CanonicalShift);
    const auto splits = build_ikf_splits(plan);
    REQUIRE(splits.size() == 3);
    for (const auto& s : splits) {
      CHECK(s.train.size() == 4);
      CHECK(s.test.size() == 4);
      CHECK(intersection_size(s.train, s.test) == 0);
    }
    CHECK(exact_cover(trains(splits), 12));
    CHECK(exact_cover(tests(splits), 12));
    // E^i is built from subfold alpha(i, j) of every other fold j.
    for (int i = 0; i < 3; ++i) {
      std::set<std::size_t> expected;
      for (int j = 0; j < 3; ++j) {
        if (j == i) continue;
        const auto& sub = plan.subfolds[static_cast<std::size_t>(j)]
                                       [static_cast<std::size_t>(plan.assignment(i, j) - 1)];
        expected.insert(sub.begin(), sub.end());
      }
      CHECK(as_set(splits[static_cast<std::size_t>(i)].train) == expected);
      CHECK(splits[static_cast<std::size_t>(i)].test == plan.folds[static_cast<std::size_t>(i)]);
    }
  }
  SUBCASE("k=2 swaps the folds") {
    const auto plan = make_plan(4, std::nullopt, 2, 8, false);
    const auto splits = build_ikf_splits(plan);
    CHECK(splits[0].test == plan.folds[0]);
    CHECK(splits[0].train == plan.folds[1]);
    CHECK(splits[1].test == plan.folds[1]);
    CHECK(splits[1].train == plan.folds[0]);
    CHECK(splits == make_splits(Scheme::kF, 4, std::nullopt, 2, 8, false));
  }
  SUBCASE("random plans") {
    SplitMix64 rng(1234);
    for (int trial = 0; trial < 60; ++trial) {
      const int k = 2 + static_cast<int>(rng.below(7));
      const std::size_t n = static_cast<std::size_t>(k * (k - 1)) + rng.below(300);
      const auto splits = make_splits(Scheme::IkF, n, std::nullopt, k, rng(), false);
      CHECK(exact_cover(trains(splits), n));
      CHECK(exact_cover(tests(splits), n));
      for (const auto& s : splits) CHECK(intersection_size(s.train, s.test) == 0);
    }
  }
  SUBCASE("custom assignment hook") {
    const auto shift = assign_subfolds(4, AssignmentStrategy::CanonicalShift, 0);
    const auto plan = make_plan(40, std::nullopt, 4, 2, false, shift);
    CHECK(plan.assignment == shift);
    CHECK(exact_cover(trains(build_ikf_splits(plan)), 40));
    AssignmentMatrix bad = AssignmentMatrix::Ones(4, 4);
    CHECK_THROWS_AS(make_plan(40, std::nullopt, 4, 2, false, bad), Error);
  }
}

TEST_CASE("kF splits") {
  const auto splits = make_splits(Scheme::kF, 10, std::nullopt, 5, 3, false);
  for (const auto& s : splits) {
    CHECK(s.train.size() == 8);
    CHECK(s.test.size() == 2);
    CHECK(intersection_size(s.train, s.test) == 0);
    CHECK(s.train.size() + s.test.size() == 10);
  }
  CHECK(exact_cover(tests(splits), 10));
  // Same seed: test folds coincide across schemes.
  const auto ikf = make_splits(Scheme::IkF, 40, std::nullopt, 5, 3, false);
  const auto kf = make_splits(Scheme::kF, 40, std::nullopt, 5, 3, false);
  for (std::size_t i = 0; i < 5; ++i) CHECK(ikf[i].test == kf[i].test);

  const std::vector<IndexList> overlapping = {{0, 1}, {1, 2}};
  CHECK_THROWS_AS(build_kf_splits(overlapping), Error);
}

TEST_CASE("overlap fractions") {
  for (int k : {3, 5, 10}) {
    const std::size_t n = static_cast<std::size_t>(k) * 30;
    const auto kf = make_splits(Scheme::kF, n, std::nullopt, k, 1, false);
    const auto m = overlap_fraction(kf);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        if (i == j) continue;
        const double oracle = static_cast<double>(intersection_size(kf[static_cast<std::size_t>(i)].train,
                                                                    kf[static_cast<std::size_t>(j)].train)) /
                              static_cast<double>(n);
        CHECK(m(i, j) == oracle);
        CHECK(m(i, j) == doctest::Approx(static_cast<double>(k - 2) / k).epsilon(1e-15));
      }
    const auto ikf = overlap_fraction(make_splits(Scheme::IkF, n, std::nullopt, k, 1, false));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (i != j) CHECK(ikf(i, j) == 0.0);
  }
  const auto ten = overlap_fraction(make_splits(Scheme::kF, 100, std::nullopt, 10, 2, false));
  CHECK(ten(0, 1) == doctest::Approx(0.8));

  const std::vector<SplitPair> single = {{0, {0, 1, 2}, {3, 4}}};
  const auto one = overlap_fraction(single);
  REQUIRE(one.rows() == 1);
  CHECK(one(0, 0) == doctest::Approx(3.0 / 2.0));
}

TEST_CASE("feasibility") {
  const std::vector<std::size_t> ok = {90, 90, 90};
  const auto yes = check_feasibility(270, std::span<const std::size_t>(ok), 10, true);
  CHECK(yes.feasible);
  CHECK(yes.required_minimum == 90);

  const std::vector<std::size_t> short_class = {90, 90, 89};
  const auto no = check_feasibility(269, std::span<const std::size_t>(short_class), 10, true);
  CHECK_FALSE(no.feasible);
  CHECK(no.limiting_factor == LimitingFactor::ClassSize);
  CHECK(no.message.find("reduce k") != std::string::npos);

  CHECK(check_feasibility(20, std::nullopt, 5, false).feasible);
  const auto n19 = check_feasibility(19, std::nullopt, 5, false);
  CHECK_FALSE(n19.feasible);
  CHECK(n19.limiting_factor == LimitingFactor::TotalSize);
  CHECK(n19.message.find("19 < 20") != std::string::npos);

  try {
    make_plan(19, std::nullopt, 5, 0, false);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewSamples);
    CHECK(is_infeasibility(e.code()));
  }

  CHECK(check_kfold_feasibility(5, std::nullopt, 5, false).feasible);
  CHECK_FALSE(check_kfold_feasibility(4, std::nullopt, 5, false).feasible);
}

TEST_CASE("stratified IkF keeps class balance in training sets") {
  const auto labels = blocks({{0, 60}, {1, 40}});
  const auto splits = make_splits(Scheme::IkF, labels.size(), std::span<const int>(labels), 5, 77, true);
  for (const auto& s : splits) {
    const auto ones = std::count_if(s.train.begin(), s.train.end(), [&](auto i) { return labels[i] == 1; });
    CHECK(ones == 8);
    CHECK(s.train.size() == 20);
  }
}
