#pragma once

// File formats.
//
// TACEMB v1 (little-endian):
//   "TACE" | u32 version | u32 samples | u32 dim | u64 total_frames |
//   f32 fps | f32 rate | samples*dim f32 (row-major) | samples u32 frame indices
//
// Annotation JSON:
//   {"video_id", "n_frames", "fps", "change_points": [[b, e), ...],
//    "user_summaries": [[0|1, ...], ...], "gt_scores": [...] (optional)}

#include "tacsum/evaluator.hpp"
#include "tacsum/model.hpp"

#include <json.hpp>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tacsum {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::array<char, 4> kTacembMagic{'T', 'A', 'C', 'E'};
inline constexpr std::uint32_t kTacembVersion = 1;

namespace detail {

template <typename T>
void put_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U bits = std::bit_cast<U>(value);
  char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
  out.write(buf, sizeof(U));
}

template <typename T>
T get_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  unsigned char buf[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(U))) throw FormatError("truncated file");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(buf[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace detail

inline void write_tacemb(std::ostream& out, const EmbeddingSet& e) {
  check(e);
  out.write(kTacembMagic.data(), kTacembMagic.size());
  detail::put_le<std::uint32_t>(out, kTacembVersion);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.rows()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.dim()));
  detail::put_le<std::uint64_t>(out, e.meta.total_frames);
  detail::put_le<float>(out, static_cast<float>(e.meta.fps));
  detail::put_le<float>(out, static_cast<float>(e.map.rate));
  for (Eigen::Index i = 0; i < e.data.rows(); ++i)
    for (Eigen::Index j = 0; j < e.data.cols(); ++j) detail::put_le<float>(out, static_cast<float>(e.data(i, j)));
  for (auto idx : e.map.sample_indices) detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(idx));
}

inline EmbeddingSet read_tacemb(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size())) throw FormatError("truncated file");
  if (magic != kTacembMagic) throw FormatError("bad magic");
  const auto version = detail::get_le<std::uint32_t>(in);
  if (version != kTacembVersion) throw FormatError("unsupported version " + std::to_string(version));
  const auto rows = detail::get_le<std::uint32_t>(in);
  const auto dim = detail::get_le<std::uint32_t>(in);
  if (rows == 0 || dim == 0) throw FormatError("empty embedding");

  EmbeddingSet e;
  e.meta.total_frames = detail::get_le<std::uint64_t>(in);
  e.meta.fps = detail::get_le<float>(in);
  e.map.rate = detail::get_le<float>(in);
  e.data.resize(rows, dim);
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t j = 0; j < dim; ++j) e.data(i, j) = detail::get_le<float>(in);
  e.map.sample_indices.resize(rows);
  for (auto& idx : e.map.sample_indices) idx = detail::get_le<std::uint32_t>(in);
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes");
  try {
    check(e);
  } catch (const InvariantError& err) {
    throw FormatError(err.what());
  }
  return e;
}

inline EmbeddingSet load_tacemb(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return read_tacemb(in);
}

inline void save_tacemb(const std::string& path, const EmbeddingSet& e) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  write_tacemb(out, e);
}

// --- annotation JSON -------------------------------------------------------

inline nlohmann::json to_json(const AnnotatedVideo& v) {
  nlohmann::json j;
  j["video_id"] = v.video_id;
  j["n_frames"] = v.meta.total_frames;
  j["fps"] = v.meta.fps;
  auto& cps = j["change_points"] = nlohmann::json::array();
  for (const auto& s : v.change_points) cps.push_back({s.begin, s.end});
  j["user_summaries"] = v.user_summaries;
  if (v.gt_scores) j["gt_scores"] = *v.gt_scores;
  return j;
}

inline AnnotatedVideo annotation_from_json(const nlohmann::json& j) {
  AnnotatedVideo v;
  try {
    v.video_id = j.at("video_id").get<std::string>();
    v.meta.total_frames = j.at("n_frames").get<std::uint64_t>();
    v.meta.fps = j.at("fps").get<double>();
    for (const auto& cp : j.at("change_points")) {
      if (!cp.is_array() || cp.size() != 2) throw FormatError("change point must be [begin, end]");
      v.change_points.push_back(Segment{cp[0].get<std::uint64_t>(), cp[1].get<std::uint64_t>()});
    }
    for (const auto& u : j.at("user_summaries")) {
      std::vector<std::uint8_t> row;
      row.reserve(u.size());
      for (const auto& b : u) row.push_back(static_cast<std::uint8_t>(b.get<int>()));
      v.user_summaries.push_back(std::move(row));
    }
    if (j.contains("gt_scores")) v.gt_scores = j.at("gt_scores").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& err) {
    throw FormatError(std::string("annotation: ") + err.what());
  }
  try {
    check(v);
  } catch (const InvariantError& err) {
    throw FormatError(err.what());
  }
  return v;
}

inline AnnotatedVideo load_annotation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return annotation_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& err) {
    throw FormatError(path + ": " + err.what());
  }
}

// --- config JSON -----------------------------------------------------------

NLOHMANN_JSON_SERIALIZE_ENUM(KeyframeRule, {{KeyframeRule::Mean, "mean"},
                                            {KeyframeRule::Middle, "middle"},
                                            {KeyframeRule::Ends, "ends"},
                                            {KeyframeRule::MiddleEnds, "middle+ends"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Interpolation, {{Interpolation::Cosine, "cosine"}, {Interpolation::Linear, "linear"}})
NLOHMANN_JSON_SERIALIZE_ENUM(BiasMode, {{BiasMode::IncreaseKeyframes, "increase-keyframes"},
                                        {BiasMode::DecreaseOthers, "decrease-others"}})
NLOHMANN_JSON_SERIALIZE_ENUM(UserAggregation, {{UserAggregation::Max, "max"}, {UserAggregation::Mean, "mean"}})

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PipelineConfig, rate, pca_dim, tsne_dim, perplexity, tsne_iters,
                                                k_max, k_midpoint, k_scale, birch_branching,
                                                birch_threshold_factor, window, min_len, keyframe_rule, interp,
                                                bias_mode, bias, seed, budget, temporal, aggregation)

// --- summary JSON ----------------------------------------------------------

inline nlohmann::json to_json(const PartitionSet& p) {
  auto arr = nlohmann::json::array();
  for (const auto& part : p.parts) arr.push_back({{"begin", part.begin}, {"end", part.end}, {"label", part.label}});
  return arr;
}

inline PartitionSet partitions_from_json(const nlohmann::json& j) {
  PartitionSet p;
  for (const auto& e : j)
    p.parts.push_back(Partition{e.at("begin").get<std::size_t>(), e.at("end").get<std::size_t>(), e.at("label").get<int>()});
  return p;
}

inline nlohmann::json to_json(const SummaryResult& s) {
  nlohmann::json j;
  j["keyframes"] = s.keyframes;
  j["sample_scores"] = s.sample_scores;
  j["frame_scores"] = s.frame_scores;
  j["partitions"] = to_json(s.partitions);
  j["selected_segments"] = s.selected_segments;
  return j;
}

inline SummaryResult summary_from_json(const nlohmann::json& j) {
  SummaryResult s;
  try {
    s.keyframes = j.at("keyframes").get<std::vector<std::size_t>>();
    s.sample_scores = j.at("sample_scores").get<std::vector<double>>();
    s.frame_scores = j.at("frame_scores").get<std::vector<double>>();
    s.partitions = partitions_from_json(j.at("partitions"));
    if (j.contains("selected_segments")) s.selected_segments = j.at("selected_segments").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& err) {
    throw FormatError(std::string("summary: ") + err.what());
  }
  return s;
}

}  // namespace tacsum
