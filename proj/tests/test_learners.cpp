#include <doctest.h>

#include <algorithm>
#include <vector>

#include "ikf/error.hpp"
#include "ikf/learners.hpp"
#include "ikf/rng.hpp"

using namespace ikf;

using Matrix = FeatureMatrix<double>;

namespace {

// All-pairs distances, stable sort, plain majority with smallest-class ties.
std::vector<int> knn_oracle(const Matrix& train, const std::vector<int>& labels, const Matrix& queries,
                            int neighbors, int c) {
  std::vector<int> out;
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    std::vector<std::pair<double, std::size_t>> d;
    for (Eigen::Index t = 0; t < train.rows(); ++t) {
      double s = 0.0;
      for (Eigen::Index j = 0; j < train.cols(); ++j) {
        const double diff = train(t, j) - queries(q, j);
        s += diff * diff;
      }
      d.emplace_back(s, static_cast<std::size_t>(t));
    }
    std::stable_sort(d.begin(), d.end());
    std::vector<int> votes(static_cast<std::size_t>(c), 0);
    for (int r = 0; r < std::min<int>(neighbors, static_cast<int>(d.size())); ++r)
      ++votes[static_cast<std::size_t>(labels[d[static_cast<std::size_t>(r)].second])];
    int best = 0;
    for (int k = 1; k < c; ++k)
      if (votes[static_cast<std::size_t>(k)] > votes[static_cast<std::size_t>(best)]) best = k;
    out.push_back(best);
  }
  return out;
}

}  // namespace

TEST_CASE("knn basics") {
  SUBCASE("single training sample") {
    Matrix x(1, 2);
    x << 3, 4;
    const std::vector<int> y = {1};
    const auto model = knn_fit(x, y, 5, 3);
    Matrix q = Matrix::Random(4, 2) * 100.0;
    for (int p : knn_predict(model, q)) CHECK(p == 1);
  }
  SUBCASE("nearest by euclidean distance") {
    Matrix x(2, 2);
    x << 0, 0, 10, 10;
    const std::vector<int> y = {0, 1};
    Matrix q(1, 2);
    q << 1, 1;
    CHECK(knn_predict(knn_fit(x, y, 1), q) == std::vector<int>{0});
  }
  SUBCASE("neighbors clamp to training size") {
    Matrix x(2, 1);
    x << 0, 1;
    const std::vector<int> y = {0, 1};
    const auto three = knn_fit(x, y, 3);
    const auto two = knn_fit(x, y, 2);
    CHECK(three.effective_neighbors() == 2);
    Matrix q(3, 1);
    q << -5, 0.4, 9;
    CHECK(knn_predict(three, q) == knn_predict(two, q));
  }
  SUBCASE("query equal to a training point") {
    Matrix x(3, 1);
    x << 0, 5, 10;
    const std::vector<int> y = {0, 2, 1};
    Matrix q(1, 1);
    q << 5;
    CHECK(knn_predict(knn_fit(x, y, 1), q) == std::vector<int>{2});
  }
  SUBCASE("tied vote goes to the smaller class") {
    Matrix x(4, 1);
    x << -1, 1, -2, 2;
    const std::vector<int> y = {1, 1, 0, 0};
    Matrix q(1, 1);
    q << 0;
    CHECK(knn_predict(knn_fit(x, y, 4), q) == std::vector<int>{0});
  }
  SUBCASE("errors") {
    Matrix empty(0, 2);
    CHECK_THROWS_AS(knn_fit(empty, std::vector<int>{}, 3), Error);
    Matrix x(2, 2);
    x.setZero();
    const std::vector<int> one = {0};
    CHECK_THROWS_AS(knn_fit(x, one, 3), Error);
    const std::vector<int> y = {0, 1};
    CHECK_THROWS_AS(knn_fit(x, y, 0), Error);
    Matrix wrong(1, 3);
    CHECK_THROWS_AS(knn_predict(knn_fit(x, y, 1), wrong), Error);
  }
}

TEST_CASE("knn matches the brute-force oracle") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix x(50, 3), q(40, 3);
    std::vector<int> y(50);
    for (Eigen::Index i = 0; i < 50; ++i) {
      for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = rng.normal();
      y[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(3));
    }
    for (Eigen::Index i = 0; i < 40; ++i)
      for (Eigen::Index j = 0; j < 3; ++j) q(i, j) = rng.normal();
    for (int neighbors : {1, 5, 7}) {
      const auto model = knn_fit(x, y, neighbors, 3);
      CHECK(knn_predict(model, q) == knn_oracle(x, y, q, neighbors, 3));
    }
  }
}

TEST_CASE("gaussian naive bayes") {
  SUBCASE("well separated classes") {
    SplitMix64 rng(3);
    Matrix x(200, 1);
    std::vector<int> y(200);
    for (Eigen::Index i = 0; i < 200; ++i) {
      y[static_cast<std::size_t>(i)] = i < 100 ? 0 : 1;
      x(i, 0) = (i < 100 ? 0.0 : 100.0) + rng.normal();
    }
    const auto model = nb_fit(x, y);
    Matrix q(2, 1);
    q << -1, 101;
    CHECK(nb_predict(model, q) == std::vector<int>{0, 1});
    CHECK(model.priors(0) == doctest::Approx(0.5));
  }
  SUBCASE("identical classes tie to the smaller index") {
    Matrix x(4, 1);
    x << 1, 2, 1, 2;
    const std::vector<int> y = {0, 0, 1, 1};
    const auto model = nb_fit(x, y);
    Matrix q(3, 1);
    q << 1.5, -7, 40;
    CHECK(nb_predict(model, q) == std::vector<int>{0, 0, 0});
  }
  SUBCASE("constant feature stays finite") {
    Matrix x(4, 2);
    x << 3, 0, 3, 1, 3, 10, 3, 11;
    const std::vector<int> y = {0, 0, 1, 1};
    const auto model = nb_fit(x, y);
    CHECK((model.variances.array() > 0).all());
    Matrix q(2, 2);
    q << 3, 0.5, 4, 10.5;
    const auto scores = nb_log_scores(model, q);
    CHECK(scores.row(0).allFinite());
    CHECK(nb_predict(model, q) == std::vector<int>{0, 1});
  }
  SUBCASE("log scores match the density formula") {
    Matrix x(6, 1);
    x << 0, 1, 2, 4, 5, 9;
    const std::vector<int> y = {0, 0, 0, 1, 1, 1};
    const auto model = nb_fit(x, y);
    // class 0: mean 1, var 2/3; class 1: mean 6, var 14/3
    Matrix q(1, 1);
    q << 3;
    const double pi = 3.14159265358979323846;
    const double s0 = std::log(0.5) - 0.5 * std::log(2 * pi * 2.0 / 3.0) - 0.5 * 4.0 / (2.0 / 3.0);
    const double s1 = std::log(0.5) - 0.5 * std::log(2 * pi * 14.0 / 3.0) - 0.5 * 9.0 / (14.0 / 3.0);
    const auto scores = nb_log_scores(model, q);
    CHECK(scores(0, 0) == doctest::Approx(s0));
    CHECK(scores(0, 1) == doctest::Approx(s1));
  }
  SUBCASE("absent class policy") {
    Matrix x(2, 1);
    x << 0, 1;
    const std::vector<int> y = {0, 2};
    CHECK_THROWS_AS(nb_fit(x, y, 3), Error);
    const auto model = nb_fit(x, y, 3, AbsentClassPolicy::Skip);
    CHECK(model.priors(1) == 0.0);
    Matrix q(1, 1);
    q << 0.5;
    CHECK(nb_predict(model, q).front() != 1);
  }
}

TEST_CASE("classifier factory") {
  for (auto kind : {ModelKind::Knn, ModelKind::GaussianNb, ModelKind::Constant}) {
    CHECK(model_from_string(to_string(kind)) == kind);
    auto model = make_classifier<double>(ModelSpec{kind, 3, 1});
    Matrix x(4, 1);
    x << 0, 1, 10, 11;
    const std::vector<int> y = {0, 0, 1, 1};
    model->fit(x, y, 2);
    Matrix q(2, 1);
    q << 0.5, 10.5;
    const auto pred = model->predict(q);
    if (kind == ModelKind::Constant) {
      CHECK(pred == std::vector<int>{1, 1});
    } else {
      CHECK(pred == std::vector<int>{0, 1});
    }
  }
  auto f = make_classifier<float>(ModelSpec{ModelKind::GaussianNb});
  FeatureMatrix<float> xf(4, 1);
  xf << 0, 1, 10, 11;
  f->fit(xf, std::vector<int>{0, 0, 1, 1}, 2);
  FeatureMatrix<float> qf(1, 1);
  qf << 9.f;
  CHECK(f->predict(qf) == std::vector<int>{1});
}
