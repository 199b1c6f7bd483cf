#pragma once

// Coarse-to-fine clustering of reduced embeddings.
//
// A single-pass CF-tree (BIRCH) yields coarse clusters, one per leaf entry.
// Coarse clusters are then merged bottom-up by average linkage over their
// centroids until a sigmoid-derived cluster count remains.

#include "tacsum/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

namespace tacsum {

inline int target_cluster_count(std::size_t num_samples, int k_max, double k_midpoint, double k_scale) {
  if (k_max < 2) throw InvariantError("target_cluster_count: k_max must be >= 2");
  const double t = static_cast<double>(num_samples);
  const double raw = std::round(k_max / (1.0 + std::exp(-(t - k_midpoint) / k_scale)));
  const int upper = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(k_max), num_samples));
  const int lower = std::min(2, upper);
  return std::clamp(static_cast<int>(raw), lower, upper);
}

// Clustering feature: count, linear sum and squared sum of the absorbed points.
struct ClusteringFeature {
  std::size_t n = 0;
  Vector linear_sum;
  double squared_sum = 0.0;

  explicit ClusteringFeature(Eigen::Index dim = 0) : linear_sum(Vector::Zero(dim)) {}

  Vector centroid() const { return linear_sum / static_cast<double>(n); }
  double radius_squared() const {
    const Vector c = centroid();
    return squared_sum / static_cast<double>(n) - c.squaredNorm();
  }
  void add(const Eigen::Ref<const Vector>& x) {
    ++n;
    linear_sum += x;
    squared_sum += x.squaredNorm();
  }
  void add(const ClusteringFeature& o) {
    n += o.n;
    linear_sum += o.linear_sum;
    squared_sum += o.squared_sum;
  }
};

// CF-tree with leaf entries acting as coarse clusters. A point joins the
// nearest leaf entry when it lies within `threshold` of that entry's centroid;
// otherwise it opens a new entry. Nodes holding more than `branching` entries
// split around their two farthest entries.
class CfTree {
 public:
  struct Entry {
    ClusteringFeature cf;
    int child = -1;     // node index for internal entries
    int cluster = -1;   // coarse cluster id for leaf entries
  };
  struct Node {
    bool leaf = true;
    std::vector<Entry> entries;
  };

  CfTree(Eigen::Index dim, int branching, double threshold)
      : dim_(dim), branching_(static_cast<std::size_t>(branching)), threshold_(threshold) {
    nodes_.push_back(Node{});
    root_ = 0;
  }

  // Inserts a point and returns the id of the coarse cluster absorbing it.
  int insert(const Eigen::Ref<const Vector>& x) {
    int assigned = -1;
    if (auto split = insert_into(root_, x, assigned)) {
      Node new_root;
      new_root.leaf = false;
      new_root.entries.push_back(summarize(root_));
      new_root.entries.push_back(summarize(*split));
      nodes_.push_back(std::move(new_root));
      root_ = static_cast<int>(nodes_.size()) - 1;
    }
    return assigned;
  }

  int num_clusters() const { return next_cluster_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return root_; }
  std::size_t branching() const { return branching_; }

 private:
  Entry summarize(int node) const {
    Entry e;
    e.cf = ClusteringFeature(dim_);
    for (const auto& c : nodes_[static_cast<std::size_t>(node)].entries) e.cf.add(c.cf);
    e.child = node;
    return e;
  }

  static std::size_t closest(const std::vector<Entry>& entries, const Eigen::Ref<const Vector>& x) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const double d = (entries[i].cf.centroid() - x).squaredNorm();
      if (d < best_d) { best_d = d; best = i; }
    }
    return best;
  }

  // Returns the index of a new sibling node when `node` had to split.
  std::optional<int> insert_into(int node, const Eigen::Ref<const Vector>& x, int& assigned) {
    auto& self = nodes_[static_cast<std::size_t>(node)];
    if (self.leaf) {
      if (!self.entries.empty()) {
        const std::size_t i = closest(self.entries, x);
        Entry& e = self.entries[i];
        if ((e.cf.centroid() - x).norm() <= threshold_) {
          e.cf.add(x);
          assigned = e.cluster;
          return std::nullopt;
        }
      }
      Entry fresh;
      fresh.cf = ClusteringFeature(dim_);
      fresh.cf.add(x);
      fresh.cluster = next_cluster_++;
      assigned = fresh.cluster;
      self.entries.push_back(std::move(fresh));
    } else {
      const std::size_t i = closest(self.entries, x);
      const int child = self.entries[i].child;
      auto split = insert_into(child, x, assigned);
      // `self` may be invalidated by node allocation below
      auto& parent = nodes_[static_cast<std::size_t>(node)];
      parent.entries[i] = summarize(child);
      if (split) parent.entries.insert(parent.entries.begin() + static_cast<std::ptrdiff_t>(i) + 1, summarize(*split));
    }
    if (nodes_[static_cast<std::size_t>(node)].entries.size() > branching_) return split_node(node);
    return std::nullopt;
  }

  int split_node(int node) {
    std::vector<Entry> entries = std::move(nodes_[static_cast<std::size_t>(node)].entries);
    const bool leaf = nodes_[static_cast<std::size_t>(node)].leaf;

    std::size_t a = 0, b = 1;
    double far = -1.0;
    for (std::size_t i = 0; i < entries.size(); ++i)
      for (std::size_t j = i + 1; j < entries.size(); ++j) {
        const double d = (entries[i].cf.centroid() - entries[j].cf.centroid()).squaredNorm();
        if (d > far) { far = d; a = i; b = j; }
      }
    const Vector ca = entries[a].cf.centroid(), cb = entries[b].cf.centroid();

    Node left, right;
    left.leaf = right.leaf = leaf;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const Vector c = entries[i].cf.centroid();
      const bool to_left = i == a || (i != b && (c - ca).squaredNorm() <= (c - cb).squaredNorm());
      (to_left ? left : right).entries.push_back(std::move(entries[i]));
    }
    nodes_[static_cast<std::size_t>(node)] = std::move(left);
    nodes_.push_back(std::move(right));
    return static_cast<int>(nodes_.size()) - 1;
  }

  Eigen::Index dim_;
  std::size_t branching_;
  double threshold_;
  std::vector<Node> nodes_;
  int root_ = 0;
  int next_cluster_ = 0;
};

// Median pairwise Euclidean distance over at most `max_points` rows chosen
// with a seeded shuffle.
inline double median_pairwise_distance(const Matrix& x, std::size_t max_points, std::uint64_t seed) {
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(x.rows()));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  if (rows.size() > max_points) {
    std::mt19937_64 rng(seed);
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(max_points);
    std::sort(rows.begin(), rows.end());
  }
  std::vector<double> d;
  d.reserve(rows.size() * (rows.size() - 1) / 2);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j) d.push_back((x.row(rows[i]) - x.row(rows[j])).norm());
  if (d.empty()) return 0.0;
  const std::size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
  if (d.size() % 2 == 1) return d[mid];
  const double upper = d[mid];
  const double lower = *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

struct BirchOptions {
  int branching = 50;
  double threshold_factor = 0.5;
  std::size_t subsample = 200;
  std::uint64_t seed = 42;
};

inline LabelSequence birch_coarse(const ReducedEmbedding& e, const BirchOptions& opt = {}) {
  const auto n = static_cast<std::size_t>(e.data.rows());
  if (n == 0) throw InvariantError("birch: no samples");
  const double threshold = opt.threshold_factor * median_pairwise_distance(e.data, opt.subsample, opt.seed);

  LabelSequence out;
  if (!(threshold > 0.0)) {
    out.labels.assign(n, 0);
    out.num_clusters = 1;
    return out;
  }
  CfTree tree(e.data.cols(), opt.branching, threshold);
  out.labels.reserve(n);
  for (Eigen::Index i = 0; i < e.data.rows(); ++i) out.labels.push_back(tree.insert(e.data.row(i).transpose()));
  out.num_clusters = tree.num_clusters();
  return compacted(out);
}

// Average-linkage merging of coarse clusters (by centroid) down to `k`
// clusters. Ties merge the lexicographically smallest id pair; the merged
// cluster keeps the smaller id. Output labels are compacted in id order.
inline LabelSequence agglomerate(const ReducedEmbedding& e, const LabelSequence& coarse, int k) {
  const int c = coarse.num_clusters;
  if (k >= c || k < 1) return coarse;

  std::vector<Vector> centroid(static_cast<std::size_t>(c), Vector::Zero(e.data.cols()));
  std::vector<std::size_t> count(static_cast<std::size_t>(c), 0);
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const auto l = static_cast<std::size_t>(coarse.labels[i]);
    centroid[l] += e.data.row(static_cast<Eigen::Index>(i)).transpose();
    ++count[l];
  }
  for (std::size_t l = 0; l < centroid.size(); ++l) centroid[l] /= static_cast<double>(count[l]);

  const auto cs = static_cast<std::size_t>(c);
  std::vector<double> dist(cs * cs, 0.0);
  for (std::size_t a = 0; a < cs; ++a)
    for (std::size_t b = a + 1; b < cs; ++b) dist[a * cs + b] = dist[b * cs + a] = (centroid[a] - centroid[b]).norm();

  std::vector<std::size_t> size(cs, 1);  // coarse clusters per merged cluster
  std::vector<bool> alive(cs, true);
  std::vector<int> owner(cs);
  std::iota(owner.begin(), owner.end(), 0);

  for (int active = c; active > k; --active) {
    std::size_t ba = 0, bb = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < cs; ++a) {
      if (!alive[a]) continue;
      for (std::size_t b = a + 1; b < cs; ++b)
        if (alive[b] && dist[a * cs + b] < best) { best = dist[a * cs + b]; ba = a; bb = b; }
    }
    // Lance-Williams update for average linkage
    for (std::size_t x = 0; x < cs; ++x) {
      if (!alive[x] || x == ba || x == bb) continue;
      const double d = (static_cast<double>(size[ba]) * dist[ba * cs + x] + static_cast<double>(size[bb]) * dist[bb * cs + x]) /
                       static_cast<double>(size[ba] + size[bb]);
      dist[ba * cs + x] = dist[x * cs + ba] = d;
    }
    size[ba] += size[bb];
    alive[bb] = false;
    for (auto& o : owner)
      if (o == static_cast<int>(bb)) o = static_cast<int>(ba);
  }

  std::vector<int> rank(cs, -1);
  int next = 0;
  for (std::size_t a = 0; a < cs; ++a)
    if (alive[a]) rank[a] = next++;
  LabelSequence out;
  out.num_clusters = k;
  out.labels.reserve(coarse.size());
  for (int l : coarse.labels) out.labels.push_back(rank[static_cast<std::size_t>(owner[static_cast<std::size_t>(l)])]);
  return out;
}

struct ClusteringResult {
  LabelSequence coarse;
  LabelSequence fine;
  int target_k = 0;
};

inline ClusteringResult cluster(const ReducedEmbedding& e, const PipelineConfig& config) {
  ClusteringResult r;
  BirchOptions opt;
  opt.branching = config.birch_branching;
  opt.threshold_factor = config.birch_threshold_factor;
  opt.seed = config.seed;
  r.coarse = birch_coarse(e, opt);
  r.target_k = target_cluster_count(e.rows(), config.k_max, config.k_midpoint, config.k_scale);
  r.fine = agglomerate(e, r.coarse, r.target_k);
  return r;
}

}  // namespace tacsum
