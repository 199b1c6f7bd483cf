#pragma once

// Snippet sampling: every second of video is cut into round(R) contiguous
// snippets and the middle frame of each snippet becomes a sample.

#include "tacsum/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace tacsum {

namespace detail {

// Frame index where second `s` begins. Non-integer fps floors the boundary.
inline std::uint64_t second_start(std::uint64_t s, double fps) {
  return static_cast<std::uint64_t>(std::floor(static_cast<double>(s) * fps + 1e-9));
}

// Splits [begin, end) into `n` snippets (longer first) and appends the middle
// frame of each non-empty snippet.
inline void append_snippet_middles(std::uint64_t begin, std::uint64_t end, std::uint64_t n,
                                   std::vector<std::uint64_t>& out) {
  const std::uint64_t len = end - begin;
  if (len == 0 || n == 0) return;
  const std::uint64_t base = len / n, extra = len % n;
  std::uint64_t start = begin;
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t size = base + (i < extra ? 1 : 0);
    if (size == 0) continue;
    out.push_back(start + size / 2);
    start += size;
  }
}

}  // namespace detail

inline SampleMap sample_indices(const VideoMeta& meta, double rate) {
  check(meta);
  if (!(rate > 0.0)) throw InvariantError("sampler: rate must be > 0");

  SampleMap map;
  map.rate = rate;
  auto& idx = map.sample_indices;
  const std::uint64_t total = meta.total_frames;

  if (meta.fps <= rate) {
    idx.resize(total);
    for (std::uint64_t f = 0; f < total; ++f) idx[f] = f;
    return map;
  }

  const auto per_second = static_cast<std::uint64_t>(std::max(1.0, std::round(rate)));
  std::uint64_t s = 0;
  while (detail::second_start(s + 1, meta.fps) <= total) {
    detail::append_snippet_middles(detail::second_start(s, meta.fps),
                                   detail::second_start(s + 1, meta.fps), per_second, idx);
    ++s;
  }
  const std::uint64_t tail_begin = detail::second_start(s, meta.fps);
  if (tail_begin < total) {
    const double frac = static_cast<double>(total - tail_begin) / meta.fps;
    const auto n = static_cast<std::uint64_t>(std::max(1.0, std::round(rate * frac)));
    detail::append_snippet_middles(tail_begin, total, n, idx);
  }
  return map;
}

// Spreads one value per sample over all frames: each frame takes the value of
// the nearest sample, ties going to the earlier sample.
inline std::vector<double> expand(const SampleMap& map, std::span<const double> sample_values,
                                  std::uint64_t total_frames) {
  if (sample_values.size() != map.size())
    throw InvariantError("expand: value count differs from sample count");
  check(map, total_frames);

  std::vector<double> out(total_frames);
  const auto& idx = map.sample_indices;
  std::size_t j = 0;
  for (std::uint64_t f = 0; f < total_frames; ++f) {
    // advance while the next sample is strictly closer
    while (j + 1 < idx.size()) {
      const std::uint64_t cur = idx[j] > f ? idx[j] - f : f - idx[j];
      const std::uint64_t nxt = idx[j + 1] > f ? idx[j + 1] - f : f - idx[j + 1];
      if (nxt < cur) ++j; else break;
    }
    out[f] = sample_values[j];
  }
  return out;
}

}  // namespace tacsum
