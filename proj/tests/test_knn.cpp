#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "lv/classifiers.hpp"
#include "oracles.hpp"

namespace {

lv::Dataset to_dataset(const oracle::KnnCase& c) { return fixture::make_dataset(c.train, c.labels); }

}  // namespace

TEST(Knn, MatchesBruteForceOracle) {
  const std::vector<std::string> variants = {"fine-knn",   "medium-knn", "coarse-knn",
                                             "cosine-knn", "cubic-knn",  "weighted-knn"};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = oracle::random_knn_case(seed, 200, 10);
    const auto d = to_dataset(c);
    const auto queries = oracle::random_knn_case(1000 + seed, 40, 10);
    lv::Matrix q(40, 10);
    for (int i = 0; i < 40; ++i)
      for (int j = 0; j < 10; ++j) q(i, j) = queries.train[i][j];
    for (const auto& name : variants) {
      const auto spec = *lv::classifier_by_name(name);
      const auto m = lv::train_classifier(d, spec);
      const auto pred = m->predict(q);
      const auto self = m->predict(d.features);
      for (int i = 0; i < 40; ++i)
        EXPECT_EQ(pred[i], oracle::knn_predict(c, queries.train[i], spec.knn.k, spec.knn.metric, spec.knn.weighted))
            << name << " seed " << seed << " query " << i;
      for (int i = 0; i < 200; i += 7)
        EXPECT_EQ(self[i], oracle::knn_predict(c, c.train[i], spec.knn.k, spec.knn.metric, spec.knn.weighted))
            << name << " seed " << seed << " train " << i;
    }
  }
}

TEST(Knn, ExactMatchGivesOwnLabel) {
  const auto c = oracle::random_knn_case(5, 100, 4);
  const auto d = to_dataset(c);
  const auto fine = lv::train_knn(d, {1, lv::KnnMetric::Euclidean, false});
  EXPECT_EQ(fine.predict(d.features), d.labels);
  const auto weighted = lv::train_knn(d, {10, lv::KnnMetric::Euclidean, true});
  EXPECT_EQ(weighted.predict(d.features), d.labels);
}

TEST(Knn, SevenOfTenVotesIsDefect) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 10; ++i) {
    rows.push_back({static_cast<double>(i)});
    labels.push_back(i < 7 ? 1 : 0);
  }
  for (int i = 0; i < 10; ++i) {
    rows.push_back({100.0 + i});
    labels.push_back(0);
  }
  const auto m = lv::train_knn(fixture::make_dataset(rows, labels), {10, lv::KnnMetric::Euclidean, false});
  EXPECT_DOUBLE_EQ(m.score(std::vector<double>{4.5}), 0.2);
  EXPECT_EQ(m.predict(std::vector<double>{4.5}), 1);
}

TEST(Knn, TiesBreakTowardLowerIndexAndClassZero) {
  // Two references equidistant from the query: the earlier row decides.
  const auto d = fixture::make_dataset({{-1.0}, {1.0}, {5.0}}, {1, 0, 0});
  const auto m = lv::train_knn(d, {1, lv::KnnMetric::Euclidean, false});
  EXPECT_EQ(m.predict(std::vector<double>{0.0}), 1);
  // An even split of votes predicts class 0.
  const auto two = lv::train_knn(d, {2, lv::KnnMetric::Euclidean, false});
  EXPECT_DOUBLE_EQ(two.score(std::vector<double>{0.0}), 0.0);
  EXPECT_EQ(two.predict(std::vector<double>{0.0}), 0);
}

TEST(Knn, CosineZeroVectorIsFarthest) {
  const auto d = fixture::make_dataset({{1.0, 1.0}, {-1.0, -1.0}, {3.0, 3.0}}, {1, 0, 0});
  const auto m = lv::train_knn(d, {1, lv::KnnMetric::Cosine, false});
  // The mean maps to the zero vector after z-scoring: every key is 1, so row 0 wins.
  EXPECT_EQ(m.predict(std::vector<double>{1.0, 1.0}), 1);
}

TEST(Knn, Errors) {
  const auto d = fixture::make_dataset({{1.0}, {2.0}, {3.0}}, {0, 1, 0});
  try {
    lv::train_knn(d, {10, lv::KnnMetric::Euclidean, false});
    FAIL();
  } catch (const lv::Error& e) {
    EXPECT_EQ(e.code(), lv::Errc::TooFewSamples);
  }
  EXPECT_THROW(lv::train_knn(d, {0, lv::KnnMetric::Euclidean, false}), lv::Error);
}
