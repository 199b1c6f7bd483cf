#include "tacsum/sampler.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

namespace tacsum {
namespace {

using Indices = std::vector<std::uint64_t>;

TEST(SampleIndices, OneSecondAtThirtyFps) {
  // snippets of 8, 8, 7, 7 frames
  EXPECT_EQ(sample_indices({30, 30.0}, 4.0).sample_indices, (Indices{4, 12, 19, 26}));
}

TEST(SampleIndices, FpsEqualToRateIsIdentity) {
  EXPECT_EQ(sample_indices({4, 4.0}, 4.0).sample_indices, (Indices{0, 1, 2, 3}));
  EXPECT_EQ(sample_indices({7, 2.5}, 4.0).sample_indices, (Indices{0, 1, 2, 3, 4, 5, 6}));
}

TEST(SampleIndices, TwoSeconds) {
  EXPECT_EQ(sample_indices({60, 30.0}, 4.0).sample_indices, (Indices{4, 12, 19, 26, 34, 42, 49, 56}));
}

TEST(SampleIndices, PartialTrailingSecond) {
  // 15 leftover frames = half a second -> round(4 * 0.5) = 2 snippets of 8 and 7
  EXPECT_EQ(sample_indices({45, 30.0}, 4.0).sample_indices, (Indices{4, 12, 19, 26, 34, 41}));
  // 2 leftover frames -> max(1, round(0.27)) = 1 snippet
  EXPECT_EQ(sample_indices({32, 30.0}, 4.0).sample_indices, (Indices{4, 12, 19, 26, 31}));
  // video shorter than a second
  EXPECT_EQ(sample_indices({3, 30.0}, 4.0).sample_indices, (Indices{1}));
}

TEST(SampleIndices, NonIntegerFps) {
  // second boundaries at 0, 29, 59: snippets 8,7,7,7 then 8,8,7,7
  const auto m = sample_indices({59, 29.97}, 4.0);
  EXPECT_EQ(m.sample_indices, (Indices{4, 11, 18, 25, 33, 41, 48, 55}));
}

TEST(SampleIndices, RejectsBadRate) {
  EXPECT_THROW(sample_indices({30, 30.0}, 0.0), InvariantError);
  EXPECT_THROW(sample_indices({0, 30.0}, 4.0), InvariantError);
}

TEST(SampleIndices, PropertyIncreasingInRangeAndStablePerSecond) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint64_t> frames(1, 2000);
  std::uniform_real_distribution<double> fps(1.0, 60.0), rate(0.5, 8.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const VideoMeta meta{frames(rng), fps(rng)};
    const double r = rate(rng);
    const auto m = sample_indices(meta, r);
    ASSERT_NO_THROW(check(m, meta.total_frames));
    if (meta.fps < r) continue;
    // every full second contributes exactly round(R) samples
    const auto per_second = static_cast<std::size_t>(std::max(1.0, std::round(r)));
    for (std::uint64_t s = 0; std::floor((s + 1) * meta.fps + 1e-9) <= meta.total_frames; ++s) {
      const auto lo = static_cast<std::uint64_t>(std::floor(s * meta.fps + 1e-9));
      const auto hi = static_cast<std::uint64_t>(std::floor((s + 1) * meta.fps + 1e-9));
      std::size_t count = 0;
      for (auto i : m.sample_indices) count += (i >= lo && i < hi);
      ASSERT_EQ(count, std::min<std::size_t>(per_second, hi - lo)) << "T=" << meta.total_frames << " fps=" << meta.fps;
    }
  }
}

TEST(Expand, SingleSampleCoversAll) {
  const SampleMap m{{1}, 4.0};
  EXPECT_EQ(expand(m, std::vector<double>{7.0}, 3), (std::vector<double>{7.0, 7.0, 7.0}));
}

TEST(Expand, TiesGoToEarlierSample) {
  const SampleMap m{{0, 2}, 4.0};
  EXPECT_EQ(expand(m, std::vector<double>{1.0, 5.0}, 4), (std::vector<double>{1.0, 1.0, 5.0, 5.0}));
}

TEST(Expand, RoundTripAndTotality) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const VideoMeta meta{1 + rng() % 900, 10.0 + static_cast<double>(rng() % 50)};
    const auto m = sample_indices(meta, 4.0);
    std::vector<double> values(m.size());
    for (auto& v : values) v = static_cast<double>(rng() % 1000);
    const auto frames = expand(m, values, meta.total_frames);
    ASSERT_EQ(frames.size(), meta.total_frames);
    for (std::size_t i = 0; i < m.size(); ++i) ASSERT_EQ(frames[m.sample_indices[i]], values[i]);

    const auto ones = expand(m, std::vector<double>(m.size(), 1.0), meta.total_frames);
    double sum = 0.0;
    for (double v : ones) sum += v;
    ASSERT_EQ(sum, static_cast<double>(meta.total_frames));
  }
}

TEST(Expand, RejectsLengthMismatch) {
  EXPECT_THROW(expand(SampleMap{{0, 2}, 4.0}, std::vector<double>{1.0}, 4), InvariantError);
}

}  // namespace
}  // namespace tacsum
