#pragma once

// Summary evaluation: importance scores become a segment selection through a
// 0/1 knapsack over pre-computed change-point segments, and the selection is
// scored against human summaries with the frame-level f-measure.

#include "tacsum/model.hpp"
#include "tacsum/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace tacsum {

struct Segment {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;  // exclusive

  std::uint64_t length() const { return end - begin; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct AnnotatedVideo {
  std::string video_id;
  VideoMeta meta;
  std::vector<Segment> change_points;
  std::vector<std::vector<std::uint8_t>> user_summaries;
  std::optional<std::vector<double>> gt_scores;

  friend bool operator==(const AnnotatedVideo&, const AnnotatedVideo&) = default;
};

inline void check(const AnnotatedVideo& v) {
  check(v.meta);
  const std::uint64_t t = v.meta.total_frames;
  detail::require(!v.change_points.empty(), "annotation: no segments");
  detail::require(v.change_points.front().begin == 0, "annotation: segments must start at frame 0");
  detail::require(v.change_points.back().end == t, "annotation: segments must end at n_frames");
  for (std::size_t i = 0; i < v.change_points.size(); ++i) {
    detail::require(v.change_points[i].begin < v.change_points[i].end, "annotation: empty segment");
    if (i > 0) detail::require(v.change_points[i - 1].end == v.change_points[i].begin, "annotation: segments not contiguous");
  }
  detail::require(!v.user_summaries.empty(), "annotation: no user summaries");
  for (const auto& u : v.user_summaries) {
    detail::require(u.size() == t, "annotation: user summary length differs from n_frames");
    for (auto b : u) detail::require(b <= 1, "annotation: user summary must be binary");
  }
  if (v.gt_scores) detail::require(v.gt_scores->size() == t, "annotation: gt_scores length differs from n_frames");
}

struct EvalResult {
  std::vector<double> per_user_f1;
  double f_measure = 0.0;
  std::vector<std::size_t> selected_segments;
  std::vector<std::uint8_t> summary_mask;
};

inline std::uint64_t budget_frames(std::uint64_t total_frames, double fraction) {
  return static_cast<std::uint64_t>(std::floor(fraction * static_cast<double>(total_frames)));
}

// Exact 0/1 knapsack: weight = segment length, value = mean frame score.
// Backtracking excludes an item whenever that keeps the optimum, so among
// optimal sets the highest-index segments are dropped first.
inline std::vector<std::size_t> knapsack_select(std::span<const Segment> segments,
                                                std::span<const double> frame_scores,
                                                std::uint64_t capacity) {
  const std::size_t n = segments.size();
  std::vector<double> value(n);
  std::vector<std::size_t> weight(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Segment& s = segments[i];
    if (s.end > frame_scores.size() || s.begin >= s.end) throw InvariantError("knapsack: bad segment");
    double sum = 0.0;
    for (std::uint64_t f = s.begin; f < s.end; ++f) sum += frame_scores[f];
    value[i] = sum / static_cast<double>(s.length());
    weight[i] = s.length();
  }

  std::uint64_t total = 0;
  for (auto w : weight) total += w;
  const auto cap = static_cast<std::size_t>(std::min(capacity, total));
  const std::size_t width = cap + 1;

  std::vector<double> table((n + 1) * width, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    const double* prev = &table[(i - 1) * width];
    double* row = &table[i * width];
    for (std::size_t w = 0; w <= cap; ++w) {
      row[w] = prev[w];
      if (weight[i - 1] <= w) row[w] = std::max(row[w], prev[w - weight[i - 1]] + value[i - 1]);
    }
  }

  std::vector<std::size_t> chosen;
  std::size_t w = cap;
  for (std::size_t i = n; i > 0; --i) {
    if (table[i * width + w] == table[(i - 1) * width + w]) continue;
    chosen.push_back(i - 1);
    w -= weight[i - 1];
  }
  std::reverse(chosen.begin(), chosen.end());
  return chosen;
}

inline std::vector<std::uint8_t> selection_mask(std::span<const Segment> segments,
                                                std::span<const std::size_t> chosen,
                                                std::uint64_t total_frames) {
  std::vector<std::uint8_t> mask(total_frames, 0);
  for (auto i : chosen)
    std::fill(mask.begin() + static_cast<std::ptrdiff_t>(segments[i].begin),
              mask.begin() + static_cast<std::ptrdiff_t>(segments[i].end), std::uint8_t{1});
  return mask;
}

inline double f1_score(std::span<const std::uint8_t> mask, std::span<const std::uint8_t> user) {
  if (mask.size() != user.size()) throw InvariantError("f_measure: length mismatch");
  std::size_t overlap = 0, selected = 0, relevant = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    selected += mask[i] != 0;
    relevant += user[i] != 0;
    overlap += mask[i] != 0 && user[i] != 0;
  }
  const double p = selected ? static_cast<double>(overlap) / static_cast<double>(selected) : 0.0;
  const double r = relevant ? static_cast<double>(overlap) / static_cast<double>(relevant) : 0.0;
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

inline EvalResult f_measure(std::span<const std::uint8_t> mask,
                            const std::vector<std::vector<std::uint8_t>>& users,
                            UserAggregation aggregation = UserAggregation::Max) {
  EvalResult r;
  r.summary_mask.assign(mask.begin(), mask.end());
  for (const auto& u : users) r.per_user_f1.push_back(f1_score(mask, u));
  if (!r.per_user_f1.empty()) {
    if (aggregation == UserAggregation::Max) {
      r.f_measure = *std::max_element(r.per_user_f1.begin(), r.per_user_f1.end());
    } else {
      double sum = 0.0;
      for (double f : r.per_user_f1) sum += f;
      r.f_measure = sum / static_cast<double>(r.per_user_f1.size());
    }
  }
  return r;
}

// Scores an arbitrary per-frame importance vector under the knapsack protocol.
inline EvalResult evaluate_scores(const AnnotatedVideo& video, std::span<const double> frame_scores,
                                  double budget_fraction, UserAggregation aggregation = UserAggregation::Max) {
  const std::uint64_t t = video.meta.total_frames;
  if (frame_scores.size() != t) throw InvariantError("evaluate: score count differs from n_frames");
  auto chosen = knapsack_select(video.change_points, frame_scores, budget_frames(t, budget_fraction));
  auto mask = selection_mask(video.change_points, chosen, t);
  EvalResult r = f_measure(mask, video.user_summaries, aggregation);
  r.selected_segments = std::move(chosen);
  return r;
}

// Mean f-measure of summaries built from i.i.d. uniform frame scores.
inline double random_baseline(const AnnotatedVideo& video, double budget_fraction, int runs, std::uint64_t seed,
                              UserAggregation aggregation = UserAggregation::Max) {
  if (runs < 1) throw InvariantError("random_baseline: runs must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> scores(video.meta.total_frames);
  double total = 0.0;
  for (int r = 0; r < runs; ++r) {
    for (auto& s : scores) s = uniform(rng);
    total += evaluate_scores(video, scores, budget_fraction, aggregation).f_measure;
  }
  return total / runs;
}

struct PipelineEvaluation {
  EvalResult result;
  PipelineArtifacts artifacts;
};

inline PipelineEvaluation evaluate_pipeline(const AnnotatedVideo& video, const EmbeddingSet& e,
                                            const PipelineConfig& config) {
  check(video);
  if (video.meta.total_frames != e.meta.total_frames)
    throw InvariantError("evaluate: embedding frame count differs from annotation");
  PipelineEvaluation out;
  out.artifacts = summarize(e, config);
  out.result = evaluate_scores(video, out.artifacts.summary.frame_scores, config.budget, config.aggregation);
  out.artifacts.summary.selected_segments = out.result.selected_segments;
  return out;
}

}  // namespace tacsum
