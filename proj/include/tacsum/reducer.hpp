#pragma once

// Two-stage dimensionality reduction: PCA followed by exact t-SNE.

#include "tacsum/model.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tacsum {

struct PcaModel {
  Vector mean;
  Matrix components;  // one principal axis per row
  Vector explained_variance;
};

// Flips each row so its largest-magnitude entry is positive (first index wins
// ties).
inline void normalize_component_signs(Matrix& components) {
  for (Eigen::Index r = 0; r < components.rows(); ++r) {
    Eigen::Index arg = 0;
    for (Eigen::Index c = 1; c < components.cols(); ++c)
      if (std::abs(components(r, c)) > std::abs(components(r, arg))) arg = c;
    if (components(r, arg) < 0.0) components.row(r) *= -1.0;
  }
}

// Projects the centered rows of `data` onto the top `pca_dim` principal axes.
// The axes come from an SVD of the centered data matrix.
inline std::pair<PcaModel, Matrix> pca_fit_transform(const Matrix& data, int pca_dim) {
  const Eigen::Index n = data.rows(), d = data.cols();
  if (n < 2) throw InvariantError("pca: need at least 2 samples");
  if (pca_dim < 1 || pca_dim > std::min(n, d))
    throw InvariantError("pca: pca_dim must be in [1, min(samples, dims)]");

  PcaModel model;
  model.mean = data.colwise().mean().transpose();
  Matrix centered = data.rowwise() - model.mean.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(centered), Eigen::ComputeThinV);
  const Eigen::MatrixXd& v = svd.matrixV();
  const Vector& sv = svd.singularValues();

  model.components = v.leftCols(pca_dim).transpose();
  normalize_component_signs(model.components);
  model.explained_variance.resize(pca_dim);
  for (int i = 0; i < pca_dim; ++i) {
    // thin SVD yields min(n, d) singular values; missing ones are zero
    const double s = i < sv.size() ? sv(i) : 0.0;
    model.explained_variance(i) = s * s / static_cast<double>(n - 1);
  }
  Matrix projected = centered * model.components.transpose();
  return {std::move(model), std::move(projected)};
}

struct TsneOptions {
  int out_dim = 2;
  double perplexity = 30.0;
  int iterations = 1000;
  int exaggeration_iters = 250;
  double exaggeration = 12.0;
  int momentum_switch_iter = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  double learning_rate = 200.0;
  double init_stddev = 1e-4;
  std::uint64_t seed = 42;
  int kl_every = 50;             // record KL every this many iterations (0: never)
  double entropy_tolerance = 1e-6;  // bits
};

struct TsneResult {
  Matrix embedding;
  double perplexity = 0.0;  // effective value after any lowering
  std::vector<std::pair<int, double>> kl_trace;  // (iterations completed, KL(P||Q))
  std::vector<double> entropy_error;  // |H(P_i) - log2(perplexity)| in bits, per point
  std::string warning;
};

namespace detail {

inline Matrix squared_distances(const Matrix& x) {
  const Eigen::Index n = x.rows();
  Vector norms = x.rowwise().squaredNorm();
  Matrix d = (-2.0 * x * x.transpose()).eval();
  d.colwise() += norms;
  d.rowwise() += norms.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = std::max(d(i, j), 0.0);
  }
  return d;
}

// Finds the Gaussian precision for row `i` whose conditional distribution has
// entropy log2(perplexity). Writes the row of P and returns the entropy error.
inline double calibrate_row(const Matrix& dist, Eigen::Index i, double perplexity, double tol,
                            Matrix& p) {
  const Eigen::Index n = dist.rows();
  const double target = std::log2(perplexity);
  double dmin = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j)
    if (j != i) dmin = std::min(dmin, dist(i, j));

  double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
  double err = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 2000; ++it) {
    double sum = 0.0, weighted = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) { p(i, j) = 0.0; continue; }
      const double shifted = dist(i, j) - dmin;
      const double w = std::exp(-beta * shifted);
      p(i, j) = w;
      sum += w;
      weighted += w * shifted;
    }
    // natural-log entropy of the normalized row, converted to bits
    const double h = (std::log(sum) + beta * weighted / sum) / std::log(2.0);
    err = std::abs(h - target);
    if (err < tol) break;
    if (h > target) {
      lo = beta;
      beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
    } else {
      hi = beta;
      beta = 0.5 * (beta + lo);
    }
  }
  p.row(i) /= p.row(i).sum();
  return err;
}

inline double kl_divergence(const Matrix& p, const Matrix& y) {
  const Eigen::Index n = y.rows();
  double z = 0.0;
  Matrix num(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      num(i, j) = i == j ? 0.0 : 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
      z += num(i, j);
    }
  double kl = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j || p(i, j) <= 0.0) continue;
      const double q = std::max(num(i, j) / z, std::numeric_limits<double>::min());
      kl += p(i, j) * std::log(p(i, j) / q);
    }
  return kl;
}

}  // namespace detail

// Exact O(n^2) t-SNE. Deterministic for a given seed.
inline TsneResult tsne(const Matrix& x, TsneOptions opt) {
  const Eigen::Index n = x.rows();
  if (n < 4) throw InvariantError("tsne: need at least 4 samples");
  if (opt.out_dim < 1) throw InvariantError("tsne: out_dim must be >= 1");
  if (!x.allFinite()) throw InvariantError("tsne: non-finite input");

  TsneResult result;
  if (static_cast<double>(n) <= 3.0 * opt.perplexity) {
    const double lowered = std::floor(static_cast<double>(n - 1) / 3.0);
    std::ostringstream msg;
    msg << "tsne: perplexity " << opt.perplexity << " too large for " << n
        << " samples, lowered to " << lowered;
    result.warning = msg.str();
    opt.perplexity = lowered;
  }
  result.perplexity = opt.perplexity;

  // input affinities
  const Matrix dist = detail::squared_distances(x);
  Matrix p(n, n);
  result.entropy_error.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    result.entropy_error[static_cast<std::size_t>(i)] =
        detail::calibrate_row(dist, i, opt.perplexity, opt.entropy_tolerance, p);
  p = (p + p.transpose()).eval();
  p /= p.sum();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) p(i, j) = std::max(p(i, j), 1e-12);

  // seeded Gaussian initialization
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, opt.init_stddev);
  Matrix y(n, opt.out_dim);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < opt.out_dim; ++c) y(i, c) = normal(rng);

  Matrix update = Matrix::Zero(n, opt.out_dim);
  Matrix gains = Matrix::Ones(n, opt.out_dim);
  Matrix grad(n, opt.out_dim);
  Matrix num(n, n);

  for (int iter = 0; iter < opt.iterations; ++iter) {
    const double exaggeration = iter < opt.exaggeration_iters ? opt.exaggeration : 1.0;
    const double momentum = iter < opt.momentum_switch_iter ? opt.initial_momentum : opt.final_momentum;
    // the second phase restarts the optimizer state
    if (iter == opt.exaggeration_iters) {
      update.setZero();
      gains.setOnes();
    }

    const Eigen::Index dim = opt.out_dim;
    double z = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      num(i, i) = 0.0;
      const double* yi = y.data() + i * dim;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double* yj = y.data() + j * dim;
        double d2 = 0.0;
        for (Eigen::Index c = 0; c < dim; ++c) d2 += (yi[c] - yj[c]) * (yi[c] - yj[c]);
        const double v = 1.0 / (1.0 + d2);
        num(i, j) = v;
        num(j, i) = v;
        z += 2.0 * v;
      }
    }
    grad.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double* yi = y.data() + i * dim;
      const double* pi = p.data() + i * n;
      const double* numi = num.data() + i * n;
      double* gi = grad.data() + i * dim;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double* yj = y.data() + j * dim;
        const double coeff = 4.0 * (exaggeration * pi[j] - numi[j] / z) * numi[j];
        for (Eigen::Index c = 0; c < dim; ++c) gi[c] += coeff * (yi[c] - yj[c]);
      }
    }
    if (!grad.allFinite()) {
      std::ostringstream msg;
      msg << "tsne: non-finite gradient at iteration " << iter;
      throw std::runtime_error(msg.str());
    }

    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index c = 0; c < opt.out_dim; ++c) {
        const bool same_sign = (grad(i, c) > 0.0) == (update(i, c) > 0.0);
        gains(i, c) = same_sign ? std::max(gains(i, c) * 0.8, 0.01) : gains(i, c) + 0.2;
        update(i, c) = momentum * update(i, c) - opt.learning_rate * gains(i, c) * grad(i, c);
      }
    y += update;
    y.rowwise() -= y.colwise().mean();

    const int done = iter + 1;
    if (opt.kl_every > 0 && (done % opt.kl_every == 0 || done == opt.iterations))
      result.kl_trace.emplace_back(done, detail::kl_divergence(p, y));
  }
  result.embedding = std::move(y);
  return result;
}

// PCA to `pca_dim` (clamped to the sample count) then t-SNE to `tsne_dim`.
// Fewer than four samples skip t-SNE and keep the leading PCA coordinates.
inline ReducedEmbedding reduce(const EmbeddingSet& e, const PipelineConfig& config,
                               std::string* warning = nullptr) {
  const auto n = static_cast<Eigen::Index>(e.rows());
  ReducedEmbedding out;
  out.data = Matrix::Zero(n, config.tsne_dim);
  if (n < 2) return out;

  const int pca_dim = static_cast<int>(std::min<Eigen::Index>(
      {static_cast<Eigen::Index>(config.pca_dim), n - 1, e.data.cols()}));
  Matrix projected = pca_fit_transform(e.data, pca_dim).second;
  if (n < 4) {
    const int keep = std::min(pca_dim, config.tsne_dim);
    out.data.leftCols(keep) = projected.leftCols(keep);
    return out;
  }

  TsneOptions opt;
  opt.out_dim = config.tsne_dim;
  opt.perplexity = config.perplexity;
  opt.iterations = config.tsne_iters;
  opt.seed = config.seed;
  opt.kl_every = 0;
  TsneResult r = tsne(projected, opt);
  if (warning) *warning = r.warning;
  out.data = std::move(r.embedding);
  return out;
}

}  // namespace tacsum
