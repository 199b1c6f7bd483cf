#pragma once

// End-to-end summarization of one video's embeddings.

#include "tacsum/clusterer.hpp"
#include "tacsum/model.hpp"
#include "tacsum/partitioner.hpp"
#include "tacsum/reducer.hpp"
#include "tacsum/sampler.hpp"
#include "tacsum/scorer.hpp"

#include <string>
#include <vector>

namespace tacsum {

// Every intermediate product, kept for inspection and plotting.
struct PipelineArtifacts {
  ReducedEmbedding reduced;
  ClusteringResult clusters;
  PartitionStages stages;   // unused when temporal partitioning is disabled
  std::vector<double> flat; // per-sample flat scores
  SummaryResult summary;
  std::string warning;
};

inline PipelineArtifacts summarize(const EmbeddingSet& e, const PipelineConfig& config) {
  validate(config, e.dim());
  check(e);

  PipelineArtifacts a;
  a.reduced = reduce(e, config, &a.warning);
  a.clusters = cluster(a.reduced, config);

  PartitionSet parts;
  if (config.temporal) {
    a.stages = partition(a.clusters.fine, config.window, config.min_len);
    parts = a.stages.refined.partitions;
  } else {
    parts = to_partitions(a.clusters.fine);
  }

  SummaryResult& s = a.summary;
  s.partitions = parts;
  s.keyframes = keyframes(parts, a.reduced.data, config.keyframe_rule);
  a.flat = flat_scores(parts);
  s.sample_scores = biased_scores(a.flat, s.keyframes, config.interp, config.bias_mode, config.bias);
  s.frame_scores = expand(e.map, s.sample_scores, e.meta.total_frames);
  return a;
}

}  // namespace tacsum
