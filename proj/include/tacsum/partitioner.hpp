#pragma once

// Turns per-sample cluster labels into temporally contiguous partitions.

#include "tacsum/model.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <vector>

namespace tacsum {

// A lone sample whose two neighbours agree takes their label. Single
// left-to-right pass, updating in place; the first and last samples are left
// alone.
inline LabelSequence eliminate_outliers(const LabelSequence& in) {
  LabelSequence out = in;
  auto& l = out.labels;
  for (std::size_t i = 1; i + 1 < l.size(); ++i)
    if (l[i - 1] == l[i + 1] && l[i] != l[i - 1]) l[i] = l[i - 1];
  return out;
}

// Sliding-window mode filter. Ties go to the label occurring nearest to the
// centre, then to the smaller label.
inline LabelSequence smooth(const LabelSequence& in, int window) {
  if (window < 1 || window % 2 == 0) throw InvariantError("smooth: window must be odd");
  const auto n = static_cast<std::ptrdiff_t>(in.size());
  const std::ptrdiff_t half = window / 2;
  LabelSequence out;
  out.num_clusters = in.num_clusters;
  out.labels.resize(in.size());

  struct Tally { int count = 0; std::ptrdiff_t nearest = 0; };
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    std::map<int, Tally> tally;
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - half); j <= std::min(n - 1, i + half); ++j) {
      auto [it, fresh] = tally.try_emplace(in.labels[static_cast<std::size_t>(j)], Tally{0, std::abs(j - i)});
      ++it->second.count;
      it->second.nearest = std::min(it->second.nearest, std::abs(j - i));
    }
    // map iterates labels in ascending order, so strict comparisons keep the smaller label
    auto best = tally.begin();
    for (auto it = std::next(tally.begin()); it != tally.end(); ++it) {
      const auto& b = best->second;
      const auto& c = it->second;
      if (c.count > b.count || (c.count == b.count && c.nearest < b.nearest)) best = it;
    }
    out.labels[static_cast<std::size_t>(i)] = best->first;
  }
  return out;
}

inline PartitionSet to_partitions(const LabelSequence& labels) {
  PartitionSet out;
  const auto& l = labels.labels;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (i == 0 || l[i] != l[i - 1]) out.parts.push_back(Partition{i, i + 1, l[i]});
    else out.parts.back().end = i + 1;
  }
  return out;
}

struct Refinement {
  PartitionSet partitions;
  std::size_t iterations = 0;
};

// Repeatedly dissolves the shortest partition (earliest on ties) until every
// partition has at least `min_len` samples or one partition remains. An
// interior partition is split between its neighbours, the left neighbour
// taking the larger half; a partition at either end merges whole into its
// only neighbour. Neighbours keep their own labels.
inline Refinement refine(const PartitionSet& parts, int min_len) {
  if (min_len < 1) throw InvariantError("refine: min_len must be >= 1");
  Refinement r{parts, 0};
  auto& p = r.partitions.parts;
  const auto eps = static_cast<std::size_t>(min_len);
  while (p.size() > 1) {
    std::size_t shortest = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
      if (p[i].length() < p[shortest].length()) shortest = i;
    if (p[shortest].length() >= eps) break;

    if (shortest == 0) {
      p[1].begin = p[0].begin;
    } else if (shortest + 1 == p.size()) {
      p[shortest - 1].end = p[shortest].end;
    } else {
      const std::size_t left_share = (p[shortest].length() + 1) / 2;
      const std::size_t cut = p[shortest].begin + left_share;
      p[shortest - 1].end = cut;
      p[shortest + 1].begin = cut;
    }
    p.erase(p.begin() + static_cast<std::ptrdiff_t>(shortest));
    ++r.iterations;
  }
  return r;
}

struct PartitionStages {
  LabelSequence cleaned;   // after outlier elimination
  LabelSequence smoothed;
  PartitionSet initial;    // runs of smoothed labels
  Refinement refined;
};

// outlier elimination -> smoothing -> runs -> refinement
inline PartitionStages partition(const LabelSequence& labels, int window, int min_len) {
  PartitionStages s;
  s.cleaned = eliminate_outliers(labels);
  s.smoothed = smooth(s.cleaned, window);
  s.initial = to_partitions(s.smoothed);
  s.refined = refine(s.initial, min_len);
  return s;
}

}  // namespace tacsum
