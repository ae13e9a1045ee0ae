#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "nll/numeric.hpp"
#include "nll/rng.hpp"

using namespace nll;

TEST(Rng, SameSeedSameStream) {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, StreamsWithDifferentTagsDiffer) {
  EXPECT_NE(derive_seed(1, "points"), derive_seed(1, "labels"));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
  EXPECT_NE(derive_seed(1, "x"), derive_seed(2, "x"));
  auto a = Rng::stream(5, "a");
  auto b = Rng::stream(5, "b");
  EXPECT_NE(a.next_u64(), b.next_u64());
}

TEST(Rng, UniformStaysInUnitInterval) {
  Rng r(3);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_LT(lo, 1e-3);
  EXPECT_GT(hi, 1 - 1e-3);
}

TEST(Rng, BelowIsUniform) {
  Rng r(11);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[r.below(7)];
  for (const int c : counts) EXPECT_NEAR(c, n / 7, 400);
}

TEST(Rng, NormalMomentsMatchStandardNormal) {
  Rng r(5);
  std::vector<double> xs(200000);
  for (auto& x : xs) x = r.normal();
  EXPECT_NEAR(mean(xs), 0.0, 0.01);
  EXPECT_NEAR(sample_stddev(xs), 1.0, 0.01);
}

TEST(Rng, CategoricalFollowsWeights) {
  Rng r(9);
  const std::vector<double> w{0.1, 0.0, 0.6, 0.3};
  std::vector<int> counts(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[r.categorical(w)];
  EXPECT_EQ(counts[1], 0);
  EXPECT_NEAR(counts[0] / double(n), 0.1, 0.005);
  EXPECT_NEAR(counts[2] / double(n), 0.6, 0.005);
  EXPECT_NEAR(counts[3] / double(n), 0.3, 0.005);
}

TEST(Rng, CategoricalOneHotAlwaysPicksTheHotCell) {
  Rng r(1);
  const std::vector<double> w{0.0, 0.0, 1.0};
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(r.categorical(w), 2u);
}

TEST(Rng, ShuffleIsAPermutation) {
  Rng r(2);
  std::vector<int> v(100);
  std::iota(v.begin(), v.end(), 0);
  shuffle(std::span(v), r);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_FALSE(std::is_sorted(v.begin(), v.end()));
}

TEST(Numeric, CompensatedSumRecoversSmallTerms) {
  CompensatedSum s;
  s += 1.0;
  for (int i = 0; i < 1000; ++i) s += 1e-16;
  s += -1.0;
  EXPECT_NEAR(s.value(), 1e-13, 1e-20);
}

TEST(Numeric, MeanStddevMedian) {
  const std::vector<double> xs{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(mean(xs), 5.0);
  EXPECT_NEAR(sample_stddev(xs), std::sqrt(32.0 / 7.0), 1e-12);
  EXPECT_DOUBLE_EQ(median(xs), 4.5);
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(sample_stddev(std::vector<double>{1.0}), 0.0);
  EXPECT_THROW(median({}), std::invalid_argument);
}

TEST(Numeric, ArgmaxPrefersLowestIndexOnTies) {
  const std::vector<double> s{0.2, 0.5, 0.5, 0.1};
  EXPECT_EQ(argmax_lowest<double>(s), 1u);
}

TEST(Numeric, SpearmanKnownValues) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(spearman(x, std::vector<double>{10, 20, 30, 40, 50}), 1.0);
  EXPECT_DOUBLE_EQ(spearman(x, std::vector<double>{5, 4, 3, 2, 1}), -1.0);
  // Ranks (1,2,3,4,5) vs (2,1,4,3,5): 1 - 6*4/(5*24) = 0.8.
  EXPECT_NEAR(spearman(x, std::vector<double>{2, 1, 4, 3, 5}), 0.8, 1e-12);
  // With ties the Pearson-on-average-ranks value: y ranks (1.5,1.5,3,4,5).
  EXPECT_NEAR(spearman(x, std::vector<double>{1, 1, 2, 3, 4}), 0.9746794344808963, 1e-12);
  EXPECT_THROW(spearman(x, std::vector<double>{1}), std::invalid_argument);
}

TEST(Numeric, ParallelForVisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(Numeric, ParallelForRethrows) {
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 5) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(Numeric, ResolveWorkers) {
  EXPECT_EQ(resolve_workers(3), 3u);
  EXPECT_GE(resolve_workers(0), 1u);
}
