#pragma once

// Core value types shared by every stage of the summarization pipeline.
//
// All indices (frames, samples, partitions, clusters) are 0-based. Every
// type is a plain value; once built it is never mutated by the stages that
// consume it, so instances can be shared freely between threads.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tacsum {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Raised when a value violates the invariants of its type.
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised by validate(PipelineConfig); the message names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {
inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvariantError(what);
}
}  // namespace detail

struct VideoMeta {
  std::uint64_t total_frames = 1;
  double fps = 1.0;

  double duration_s() const { return static_cast<double>(total_frames) / fps; }
  friend bool operator==(const VideoMeta&, const VideoMeta&) = default;
};

inline void check(const VideoMeta& m) {
  detail::require(m.total_frames >= 1, "video: total_frames must be >= 1");
  detail::require(std::isfinite(m.fps) && m.fps > 0.0, "video: fps must be > 0");
}

// Original-frame index of every sample, in temporal order.
struct SampleMap {
  std::vector<std::uint64_t> sample_indices;
  double rate = 4.0;

  std::size_t size() const { return sample_indices.size(); }
};

inline void check(const SampleMap& map, std::uint64_t total_frames) {
  detail::require(!map.sample_indices.empty(), "sample map: no samples");
  detail::require(map.rate > 0.0, "sample map: rate must be > 0");
  for (std::size_t i = 0; i < map.sample_indices.size(); ++i) {
    detail::require(map.sample_indices[i] < total_frames, "sample map: index out of range");
    if (i > 0)
      detail::require(map.sample_indices[i - 1] < map.sample_indices[i],
                      "sample map: indices must be strictly increasing");
  }
}

struct EmbeddingSet {
  VideoMeta meta;
  SampleMap map;
  Matrix data;  // one row per sample

  std::size_t dim() const { return static_cast<std::size_t>(data.cols()); }
  std::size_t rows() const { return static_cast<std::size_t>(data.rows()); }
};

inline void check(const EmbeddingSet& e) {
  check(e.meta);
  check(e.map, e.meta.total_frames);
  detail::require(e.rows() == e.map.size(), "embeddings: row count differs from sample count");
  detail::require(e.dim() >= 1, "embeddings: dimension must be >= 1");
  detail::require(e.data.allFinite(), "embeddings: non-finite entry");
}

struct ReducedEmbedding {
  Matrix data;

  std::size_t dim() const { return static_cast<std::size_t>(data.cols()); }
  std::size_t rows() const { return static_cast<std::size_t>(data.rows()); }
};

inline void check(const ReducedEmbedding& r, const EmbeddingSet& source) {
  detail::require(r.rows() == source.rows(), "reduced embedding: row count differs from source");
  detail::require(r.dim() < source.dim(), "reduced embedding: dimension not reduced");
  detail::require(r.data.allFinite(), "reduced embedding: non-finite entry");
}

struct LabelSequence {
  std::vector<int> labels;
  int num_clusters = 0;

  std::size_t size() const { return labels.size(); }
};

inline void check(const LabelSequence& s) {
  for (int l : s.labels)
    detail::require(l >= 0 && l < s.num_clusters, "labels: label out of range");
}

// Relabels clusters to [0, K) in order of first appearance.
inline LabelSequence compacted(const LabelSequence& s) {
  std::vector<int> remap;
  LabelSequence out;
  out.labels.reserve(s.size());
  for (int l : s.labels) {
    if (l >= static_cast<int>(remap.size())) remap.resize(static_cast<std::size_t>(l) + 1, -1);
    if (remap[static_cast<std::size_t>(l)] < 0) remap[static_cast<std::size_t>(l)] = out.num_clusters++;
    out.labels.push_back(remap[static_cast<std::size_t>(l)]);
  }
  return out;
}

struct Partition {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
  int label = 0;

  std::size_t length() const { return end - begin; }
  friend bool operator==(const Partition&, const Partition&) = default;
};

struct PartitionSet {
  std::vector<Partition> parts;

  std::size_t count() const { return parts.size(); }
  std::size_t total_length() const { return parts.empty() ? 0 : parts.back().end; }
  std::vector<std::size_t> lengths() const {
    std::vector<std::size_t> out;
    out.reserve(parts.size());
    for (const auto& p : parts) out.push_back(p.length());
    return out;
  }
  // Index of the partition containing `sample`.
  std::size_t find(std::size_t sample) const {
    std::size_t lo = 0, hi = parts.size();
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      if (parts[mid].begin <= sample) lo = mid; else hi = mid;
    }
    return lo;
  }
  friend bool operator==(const PartitionSet&, const PartitionSet&) = default;
};

inline void check(const PartitionSet& p, std::size_t num_samples) {
  detail::require(!p.parts.empty(), "partitions: empty");
  detail::require(p.parts.front().begin == 0, "partitions: first does not start at 0");
  detail::require(p.parts.back().end == num_samples, "partitions: last does not end at sample count");
  for (std::size_t i = 0; i < p.parts.size(); ++i) {
    detail::require(p.parts[i].begin < p.parts[i].end, "partitions: empty partition");
    if (i > 0) detail::require(p.parts[i - 1].end == p.parts[i].begin, "partitions: not contiguous");
  }
}

struct SummaryResult {
  std::vector<std::size_t> keyframes;  // sample indices, sorted
  std::vector<double> sample_scores;
  std::vector<double> frame_scores;
  std::vector<std::size_t> selected_segments;
  PartitionSet partitions;

  friend bool operator==(const SummaryResult&, const SummaryResult&) = default;
};

inline void check(const SummaryResult& s) {
  const std::size_t n = s.sample_scores.size();
  for (std::size_t i = 0; i < s.keyframes.size(); ++i) {
    detail::require(s.keyframes[i] < n, "summary: keyframe out of range");
    if (i > 0) detail::require(s.keyframes[i - 1] < s.keyframes[i], "summary: keyframes not sorted");
  }
  for (double v : s.sample_scores) detail::require(std::isfinite(v) && v >= 0.0, "summary: bad sample score");
  for (double v : s.frame_scores) detail::require(std::isfinite(v) && v >= 0.0, "summary: bad frame score");
  if (!s.partitions.parts.empty()) {
    check(s.partitions, n);
    // each partition must hold at least one keyframe
    std::vector<bool> has_key(s.partitions.count(), false);
    for (auto k : s.keyframes) has_key[s.partitions.find(k)] = true;
    for (bool b : has_key) detail::require(b, "summary: partition without keyframe");
  }
}

enum class KeyframeRule { Mean, Middle, Ends, MiddleEnds };
enum class Interpolation { Cosine, Linear };
enum class BiasMode { IncreaseKeyframes, DecreaseOthers };
enum class UserAggregation { Max, Mean };

struct PipelineConfig {
  double rate = 4.0;
  int pca_dim = 34;
  int tsne_dim = 2;
  double perplexity = 30.0;
  int tsne_iters = 1000;
  int k_max = 16;
  double k_midpoint = 200.0;
  double k_scale = 100.0;
  int birch_branching = 50;
  double birch_threshold_factor = 0.5;
  int window = 5;
  int min_len = 4;
  KeyframeRule keyframe_rule = KeyframeRule::MiddleEnds;
  Interpolation interp = Interpolation::Cosine;
  BiasMode bias_mode = BiasMode::IncreaseKeyframes;
  double bias = 0.5;
  std::uint64_t seed = 42;
  double budget = 0.15;
  bool temporal = true;  // false: skip semantic partitioning (ablation)
  UserAggregation aggregation = UserAggregation::Max;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

// Returns `config` unchanged when valid. `embedding_dim`, when non-zero, also
// checks pca_dim against the data dimension.
inline PipelineConfig validate(const PipelineConfig& c, std::size_t embedding_dim = 0) {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(c.rate > 0.0) || !std::isfinite(c.rate)) fail("rate must be > 0");
  if (c.tsne_dim < 1) fail("tsne_dim must be >= 1");
  if (c.pca_dim <= c.tsne_dim) fail("pca_dim must exceed tsne_dim");
  if (embedding_dim != 0 && static_cast<std::size_t>(c.pca_dim) > embedding_dim)
    fail("pca_dim exceeds embedding dimension");
  if (!(c.perplexity > 0.0)) fail("perplexity must be > 0");
  if (c.tsne_iters < 1) fail("tsne_iters must be >= 1");
  if (c.k_max < 2) fail("k_max must be >= 2");
  if (!(c.k_scale > 0.0)) fail("k_scale must be > 0");
  if (c.birch_branching < 2) fail("birch_branching must be >= 2");
  if (!(c.birch_threshold_factor > 0.0)) fail("birch_threshold_factor must be > 0");
  if (c.window < 1) fail("window must be >= 1");
  if (c.window % 2 == 0) fail("window must be odd");
  if (c.min_len < 1) fail("min_len must be >= 1");
  if (!(c.bias >= 0.0 && c.bias <= 1.0)) fail("bias out of range [0, 1]");
  if (!(c.budget > 0.0 && c.budget < 1.0)) fail("budget out of range (0, 1)");
  return c;
}

}  // namespace tacsum
