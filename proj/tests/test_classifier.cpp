#include <gtest/gtest.h>

#include <map>
#include <numeric>
#include <vector>

#include "nll/classifier.hpp"
#include "nll/dataset.hpp"
#include "nll/errors.hpp"
#include "nll/oracle.hpp"

using namespace nll;

namespace {

DiscreteClassifier h_star() {
  const auto w = tabular_world();
  return DiscreteClassifier(w, std::vector<Label>(w.true_labels().begin(), w.true_labels().end()));
}

}  // namespace

TEST(Accuracy, LookupOfItsOwnTrainingSetIsPerfect) {
  const auto ds = make_moons(300, 0.1, 1);
  EXPECT_EQ(accuracy(LookupClassifier(ds), ds), 1.0);
}

TEST(Accuracy, ConstantClassifierOnBalancedSet) {
  const auto ds = make_circles(1000, 0.08, 2);
  EXPECT_EQ(accuracy(ConstantClassifier(2, 2, 1), ds), 0.5);
}

TEST(Accuracy, OptimalClassifierOnNoisyTabularSample) {
  const auto ds = sample_iid(tabular_world(), 1'000'000, uniform_noise(2, 0.25), 17);
  EXPECT_NEAR(accuracy(h_star(), ds), 0.75, 0.002);
}

TEST(Accuracy, EmptyOrMismatchedThrows) {
  EXPECT_THROW(accuracy(ConstantClassifier(2, 2, 0), LabeledDataset(2, 2)), InvalidArgument);
  EXPECT_THROW(accuracy(ConstantClassifier(3, 2, 0), make_moons(10, 0.1, 0)), InvalidArgument);
}

TEST(Accuracy, InvariantUnderRowPermutation) {
  const auto ds = make_moons(400, 0.3, 3);
  const auto noisy = ds.with_labels(corrupt_labels(ds.labels(), uniform_noise(2, 0.3), 1));
  const LookupClassifier h(ds);
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    shuffle(std::span(order), rng);
    EXPECT_EQ(accuracy(h, noisy.subset(order)), accuracy(h, noisy));
  }
}

TEST(Confusion, PerfectClassifierGivesIdentity) {
  const auto ds = make_moons(200, 0.1, 4);
  const auto c = confusion(LookupClassifier(ds), ds);
  EXPECT_EQ(c.rows(), ConfusionMatrix::identity(2).rows());
}

TEST(Confusion, ConstantZeroClassifier) {
  const auto c = confusion(ConstantClassifier(2, 2, 0), make_moons(50, 0.1, 1));
  EXPECT_EQ(c(0, 0), 1.0);
  EXPECT_EQ(c(1, 0), 1.0);
  EXPECT_EQ(c(1, 1), 0.0);
}

TEST(Confusion, AbsentClassRowIsFlaggedNotThrown) {
  LabeledDataset ds(1, 3);
  const std::vector<double> a{0.0}, b{1.0};
  ds.push_back(a, 0);
  ds.push_back(b, 2);
  const auto c = confusion(ConstantClassifier(1, 3, 0), ds);
  EXPECT_TRUE(c.row_defined(0));
  EXPECT_FALSE(c.row_defined(1));
  EXPECT_TRUE(c.row_defined(2));
  EXPECT_FALSE(c.all_defined());
}

TEST(Confusion, RowsSumToOneAndReproduceAccuracy) {
  const auto clean = make_moons(3000, 0.2, 5);
  const auto noisy = clean.with_labels(corrupt_labels(clean.labels(), uniform_noise(2, 0.3), 3));
  const auto [train, test] = split(noisy, 0.5, 2);
  const LookupClassifier h(train, TieBreak::LowestIndex, 1);
  const auto c = confusion(h, test);
  std::vector<double> class_freq(2, 0.0);
  for (const Label y : test.labels()) class_freq[y] += 1.0 / test.size();
  double via_rows = 0.0;
  for (int i = 0; i < 2; ++i) {
    double s = 0.0;
    for (int j = 0; j < 2; ++j) s += c(i, j);
    EXPECT_NEAR(s, 1.0, 1e-9);
    via_rows += class_freq[i] * c(i, i);
  }
  EXPECT_NEAR(via_rows, accuracy(h, test), 1e-12);
}

TEST(ConfusionMatrix, FromRowsValidates) {
  EXPECT_THROW(ConfusionMatrix::from_rows({{0.5, 0.4}, {0.0, 1.0}}), InvalidArgument);
  EXPECT_THROW(ConfusionMatrix::from_rows({{1.0}}), InvalidArgument);
  EXPECT_NO_THROW(ConfusionMatrix::from_rows({{0.5, 0.5}, {0.0, 1.0}}));
}

TEST(Lookup, SeenAndUnseenPoints) {
  LabeledDataset train(2, 2);
  const std::vector<double> origin{0, 0}, far{5, 5};
  train.push_back(origin, 1);
  const LookupClassifier h(train, TieBreak::LowestIndex, 0);
  EXPECT_EQ(h.predict(origin), 1);
  EXPECT_EQ(h.predict(far), 0);
  const LookupClassifier h1(train, TieBreak::LowestIndex, 1);
  EXPECT_EQ(h1.predict(far), 1);
}

TEST(Lookup, TieBreakAtDuplicatedPoints) {
  LabeledDataset train(1, 3);
  const std::vector<double> x{1.0};
  train.push_back(x, 2);
  train.push_back(x, 1);
  EXPECT_EQ(LookupClassifier(train, TieBreak::LowestIndex).predict(x), 1);
  EXPECT_EQ(LookupClassifier(train, TieBreak::HighestIndex).predict(x), 2);
  train.push_back(x, 2);
  EXPECT_EQ(LookupClassifier(train, TieBreak::LowestIndex).predict(x), 2);
}

TEST(Lookup, MemorizesDistinctTabularPoints) {
  const auto w = tabular_world();
  auto ds = w.support();
  ds = ds.with_labels(corrupt_labels(ds.labels(), uniform_noise(2, 0.25), 4));
  EXPECT_EQ(accuracy(LookupClassifier(ds), ds), 1.0);
}

TEST(Lookup, LargeTabularSampleReachesModalFrequency) {
  const auto w = tabular_world();
  const auto ds = sample_iid(w, 100000, uniform_noise(2, 0.25), 6);
  std::map<std::size_t, std::vector<double>> counts;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto& c = counts[*w.find(ds.features(i))];
    c.resize(2, 0.0);
    c[ds.label(i)] += 1;
  }
  double modal = 0.0;
  for (const auto& [x, c] : counts) modal += std::max(c[0], c[1]);
  EXPECT_NEAR(accuracy(LookupClassifier(ds), ds), modal / ds.size(), 0.005);
}

TEST(Lookup, LargeTabularSampleRecoversTheOptimalClassifier) {
  // 12500 draws per point make the modal label the true label, so on the
  // full support the confusion is the identity.
  const auto w = tabular_world();
  const auto ds = sample_iid(w, 100000, uniform_noise(2, 0.25), 6);
  const auto c = confusion(LookupClassifier(ds), w.support());
  EXPECT_EQ(c.rows(), ConfusionMatrix::identity(2).rows());
}

TEST(Lookup, MemorizerOfDistinctNoisyPointsHasConfusionNearT) {
  // Every moons sample is a distinct point, so the lookup fits all noisy
  // labels; against the clean labels of the same inputs its confusion is the
  // realized noise.
  const auto t = TransitionMatrix::from_rows({{0.7, 0.3}, {0.2, 0.8}});
  const auto clean = make_moons(100000, 0.1, 21);
  const auto noisy = clean.with_labels(corrupt_labels(clean.labels(), t, 22));
  const auto c = confusion(LookupClassifier(noisy), clean);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(c(i, j), t(i, j), 0.01);
  }
}

TEST(Lookup, AverageConfusionOverOneDrawPerPointIsT) {
  const auto w = tabular_world();
  const auto t = uniform_noise(2, 0.25);
  std::vector<double> sum(4, 0.0);
  const int seeds = 2000;
  for (int s = 0; s < seeds; ++s) {
    const auto support = w.support();
    const auto noisy = support.with_labels(corrupt_labels(support.labels(), t, s));
    const auto c = confusion(LookupClassifier(noisy), support);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) sum[i * 2 + j] += c(i, j) / seeds;
    }
  }
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(sum[i * 2 + j], t(i, j), 0.01);
  }
}
