#pragma once

// Keyframe selection and importance scoring.
//
// Each sample first scores the length of its partition. Keyframe biasing then
// scales that flat score by a kernel which equals 1 at key positions and 0
// halfway between consecutive keys:
//
//   increase-keyframes: v = flat * (1 + B * w)     keys get flat * (1 + B)
//   decrease-others:    v = flat * (1 - B + B * w) keys keep flat
//
// so the troughs sit at flat (resp. flat * (1 - B)).

#include "tacsum/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace tacsum {

inline std::vector<std::size_t> keyframes(const PartitionSet& parts, const Matrix& reduced, KeyframeRule rule) {
  std::vector<std::size_t> keys;
  for (const auto& p : parts.parts) {
    const std::size_t middle = p.begin + p.length() / 2;
    switch (rule) {
      case KeyframeRule::Mean: {
        const Eigen::Index b = static_cast<Eigen::Index>(p.begin), len = static_cast<Eigen::Index>(p.length());
        const Eigen::RowVectorXd centroid = reduced.middleRows(b, len).colwise().mean();
        std::size_t best = p.begin;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = p.begin; i < p.end; ++i) {
          const double d = (reduced.row(static_cast<Eigen::Index>(i)) - centroid).squaredNorm();
          if (d < best_d) { best_d = d; best = i; }
        }
        keys.push_back(best);
        break;
      }
      case KeyframeRule::Middle:
        keys.push_back(middle);
        break;
      case KeyframeRule::Ends:
        keys.push_back(p.begin);
        keys.push_back(p.end - 1);
        break;
      case KeyframeRule::MiddleEnds:
        keys.push_back(p.begin);
        keys.push_back(middle);
        keys.push_back(p.end - 1);
        break;
    }
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

inline std::vector<double> flat_scores(const PartitionSet& parts) {
  std::vector<double> v(parts.total_length());
  for (const auto& p : parts.parts)
    std::fill(v.begin() + static_cast<std::ptrdiff_t>(p.begin), v.begin() + static_cast<std::ptrdiff_t>(p.end),
              static_cast<double>(p.length()));
  return v;
}

// Kernel weight at position t between keys a < b: 1 at the keys, 0 at the
// midpoint.
inline double interpolation_weight(double t, double a, double b, Interpolation interp) {
  const double gap = b - a;
  if (gap <= 0.0) return 1.0;
  const double phase = std::clamp(2.0 * std::min(t - a, b - t) / gap, 0.0, 1.0);
  if (interp == Interpolation::Linear) return 1.0 - phase;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * phase));
}

inline std::vector<double> biased_scores(std::span<const double> flat, std::span<const std::size_t> keys,
                                         Interpolation interp, BiasMode mode, double bias) {
  if (keys.empty()) throw InvariantError("biased_scores: no keyframes");
  if (!(bias >= 0.0 && bias <= 1.0)) throw InvariantError("biased_scores: bias out of range");
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i] >= flat.size()) throw InvariantError("biased_scores: keyframe out of range");
    if (i > 0 && keys[i - 1] >= keys[i]) throw InvariantError("biased_scores: keyframes not sorted");
  }

  const double base = mode == BiasMode::IncreaseKeyframes ? 1.0 : 1.0 - bias;
  std::vector<double> v(flat.size());
  std::size_t next = 0;  // first key >= t
  for (std::size_t t = 0; t < flat.size(); ++t) {
    while (next < keys.size() && keys[next] < t) ++next;
    double w = 1.0;  // outside the key range and on keys
    if (next > 0 && next < keys.size() && keys[next] != t)
      w = interpolation_weight(static_cast<double>(t), static_cast<double>(keys[next - 1]),
                               static_cast<double>(keys[next]), interp);
    v[t] = flat[t] * (base + bias * w);
  }
  return v;
}

}  // namespace tacsum
