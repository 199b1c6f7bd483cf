#include "tacsum/partitioner.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

namespace tacsum {
namespace {

LabelSequence seq(std::vector<int> l) {
  int k = 0;
  for (int v : l) k = std::max(k, v + 1);
  return {std::move(l), k};
}

PartitionSet from_lengths(const std::vector<std::size_t>& lengths) {
  PartitionSet p;
  std::size_t at = 0;
  int label = 0;
  for (auto len : lengths) {
    p.parts.push_back({at, at + len, label++});
    at += len;
  }
  return p;
}

TEST(EliminateOutliers, LoneSampleAbsorbed) {
  EXPECT_EQ(eliminate_outliers(seq({0, 0, 1, 0, 0})).labels, (std::vector<int>{0, 0, 0, 0, 0}));
}

TEST(EliminateOutliers, RunOfTwoUntouched) {
  EXPECT_EQ(eliminate_outliers(seq({0, 0, 1, 1, 0})).labels, (std::vector<int>{0, 0, 1, 1, 0}));
}

TEST(EliminateOutliers, EndsUntouched) {
  EXPECT_EQ(eliminate_outliers(seq({1, 0, 0})).labels, (std::vector<int>{1, 0, 0}));
  EXPECT_EQ(eliminate_outliers(seq({0, 0, 1})).labels, (std::vector<int>{0, 0, 1}));
  EXPECT_EQ(eliminate_outliers(seq({2})).labels, (std::vector<int>{2}));
}

TEST(EliminateOutliers, SinglePassUsesUpdatedLeftNeighbour) {
  // index 1 becomes 1, after which index 2 no longer has agreeing neighbours
  EXPECT_EQ(eliminate_outliers(seq({1, 0, 1, 0})).labels, (std::vector<int>{1, 1, 1, 0}));
}

TEST(Smooth, ConstantUnchanged) {
  EXPECT_EQ(smooth(seq({3, 3, 3, 3}), 5).labels, (std::vector<int>{3, 3, 3, 3}));
}

TEST(Smooth, WindowFiveRemovesSpike) {
  EXPECT_EQ(smooth(seq({0, 0, 1, 0, 0}), 5).labels, (std::vector<int>{0, 0, 0, 0, 0}));
}

TEST(Smooth, WindowThreeKeepsStep) {
  EXPECT_EQ(smooth(seq({0, 0, 0, 1, 1, 1}), 3).labels, (std::vector<int>{0, 0, 0, 1, 1, 1}));
}

TEST(Smooth, TieGoesToNearestThenSmallest) {
  // window at index 0 is {2, 1}: tie, label 2 sits at distance 0
  EXPECT_EQ(smooth(seq({2, 1, 1}), 3).labels[0], 2);
  // window at index 1 of {1, 0, 2}: three-way tie, 0 is at distance 0
  EXPECT_EQ(smooth(seq({1, 0, 2}), 3).labels[1], 0);
  // window at index 2 of {1, 2, 0, 0, 2}: tie 2 vs 2 between labels 0 and 2,
  // 0 is at distance 0
  EXPECT_EQ(smooth(seq({1, 2, 0, 0, 2}), 5).labels[2], 0);
  // {5, 3, 7, 3, 5} W=5 at index 2: 3 and 5 tie at count 2, both at distance 1
  // from centre for 3 and 2 for 5 -> 3
  EXPECT_EQ(smooth(seq({5, 3, 7, 3, 5}), 5).labels[2], 3);
}

TEST(Smooth, RejectsEvenWindow) { EXPECT_THROW(smooth(seq({0, 1}), 4), InvariantError); }

TEST(ToPartitions, Runs) {
  const auto p = to_partitions(seq({0, 0, 1, 1, 1}));
  EXPECT_EQ(p.parts, (std::vector<Partition>{{0, 2, 0}, {2, 5, 1}}));
  EXPECT_EQ(to_partitions(seq({4, 4, 4})).count(), 1u);
  EXPECT_EQ(to_partitions(seq({0, 1, 0, 1})).lengths(), (std::vector<std::size_t>{1, 1, 1, 1}));
}

TEST(Refine, SplitsInteriorBetweenNeighbours) {
  const auto r = refine(from_lengths({5, 2, 6}), 4);
  EXPECT_EQ(r.partitions.lengths(), (std::vector<std::size_t>{6, 7}));
  EXPECT_EQ(r.partitions.parts[0].label, 0);
  EXPECT_EQ(r.partitions.parts[1].label, 2);
  EXPECT_EQ(r.iterations, 1u);
}

TEST(Refine, OddLengthLeftTakesCeiling) {
  EXPECT_EQ(refine(from_lengths({5, 3, 6}), 4).partitions.lengths(), (std::vector<std::size_t>{7, 7}));
}

TEST(Refine, AlreadySatisfied) {
  const auto r = refine(from_lengths({4, 4}), 4);
  EXPECT_EQ(r.partitions.lengths(), (std::vector<std::size_t>{4, 4}));
  EXPECT_EQ(r.iterations, 0u);
}

TEST(Refine, CollapsesToOne) {
  const auto r = refine(from_lengths({1, 1, 1}), 4);
  EXPECT_EQ(r.partitions.lengths(), (std::vector<std::size_t>{3}));
  EXPECT_EQ(r.iterations, 2u);
}

TEST(Refine, EndsMergeWhole) {
  EXPECT_EQ(refine(from_lengths({2, 9, 8}), 4).partitions.lengths(), (std::vector<std::size_t>{11, 8}));
  EXPECT_EQ(refine(from_lengths({9, 8, 3}), 4).partitions.lengths(), (std::vector<std::size_t>{9, 11}));
}

TEST(Refine, FuzzInvariants) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 300;
    const int k = 1 + static_cast<int>(rng() % 6);
    LabelSequence l;
    l.num_clusters = k;
    for (std::size_t i = 0; i < n; ++i) l.labels.push_back(static_cast<int>(rng() % static_cast<unsigned>(k)));
    const int eps = 1 + static_cast<int>(rng() % 8);
    const int window = 1 + 2 * static_cast<int>(rng() % 4);

    const auto stages = partition(l, window, eps);
    ASSERT_NO_THROW(check(stages.initial, n));
    const auto& out = stages.refined.partitions;
    ASSERT_NO_THROW(check(out, n));
    ASSERT_LE(stages.refined.iterations, stages.initial.count() - 1);
    ASSERT_EQ(out.count(), stages.initial.count() - stages.refined.iterations);
    if (out.count() > 1) {
      for (auto len : out.lengths()) ASSERT_GE(len, static_cast<std::size_t>(eps));
    }

    // smoothing only picks labels present in each window
    for (std::size_t i = 0; i < n; ++i) {
      bool found = false;
      const std::size_t lo = i >= static_cast<std::size_t>(window / 2) ? i - window / 2 : 0;
      for (std::size_t j = lo; j <= std::min(n - 1, i + window / 2); ++j)
        found |= stages.cleaned.labels[j] == stages.smoothed.labels[i];
      ASSERT_TRUE(found);
    }
  }
}

}  // namespace
}  // namespace tacsum
