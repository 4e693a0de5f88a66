#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "kufs/feature_matrix.hpp"
#include "kufs/types.hpp"

namespace kufs {

template <typename Scalar>
struct KmeansResult {
  ClusterLabels labels;
  Scalar objective = 0;  // final sum of squared errors J_k
  std::vector<Scalar> objective_history;
  Matrix<Scalar> centroids;  // d x k
  Index iterations = 0;
};

/// Lloyd's algorithm over columns-as-samples. Initialization picks k
/// distinct columns uniformly at random from the given seed. Stops when the
/// assignment is unchanged (and no empty-cluster repair fired) or after
/// `max_iterations`. Empty clusters seize the point farthest from its own
/// centroid. J_k is nonincreasing across iterations.
template <typename Scalar>
KmeansResult<Scalar> lloyd_kmeans(const Matrix<Scalar>& x, int k, std::uint64_t seed,
                                  Index max_iterations = 300) {
  const Index d = x.rows();
  const Index n = x.cols();
  if (k < 1 || static_cast<Index>(k) > n) {
    throw std::invalid_argument("lloyd_kmeans: k out of range [1, n]");
  }

  // partial Fisher-Yates: k distinct columns, uniform over subsets
  std::mt19937_64 rng(seed);
  std::vector<Index> pool(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }

  Matrix<Scalar> centroids(d, k);
  for (int c = 0; c < k; ++c) centroids.col(c) = x.col(pool[static_cast<std::size_t>(c)]);

  KmeansResult<Scalar> out;
  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  std::vector<int> prev_assign;

  for (Index it = 1; it <= max_iterations; ++it) {
    prev_assign = assign;

    // assignment step: nearest centroid, ties to the smaller cluster index
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index j = 0; j < n; ++j) {
      int best = 0;
      Scalar best_d = (x.col(j) - centroids.col(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const Scalar dd = (x.col(j) - centroids.col(c)).squaredNorm();
        if (dd < best_d) {
          best_d = dd;
          best = c;
        }
      }
      assign[static_cast<std::size_t>(j)] = best;
      ++counts[static_cast<std::size_t>(best)];
    }

    // empty-cluster repair: seize the point farthest from its centroid,
    // never emptying another cluster
    bool repaired = false;
    for (int e = 0; e < k; ++e) {
      if (counts[static_cast<std::size_t>(e)] > 0) continue;
      Index far = -1;
      Scalar far_d = -1;
      for (Index j = 0; j < n; ++j) {
        const int c = assign[static_cast<std::size_t>(j)];
        if (counts[static_cast<std::size_t>(c)] < 2) continue;
        const Scalar dd = (x.col(j) - centroids.col(c)).squaredNorm();
        if (dd > far_d) {
          far_d = dd;
          far = j;
        }
      }
      if (far >= 0) {
        --counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(far)])];
        assign[static_cast<std::size_t>(far)] = e;
        ++counts[static_cast<std::size_t>(e)];
        centroids.col(e) = x.col(far);
        repaired = true;
      }
    }

    // centroid update
    centroids.setZero();
    for (Index j = 0; j < n; ++j) {
      centroids.col(assign[static_cast<std::size_t>(j)]) += x.col(j);
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centroids.col(c) /= static_cast<Scalar>(counts[static_cast<std::size_t>(c)]);
      }
    }

    Scalar j_k = 0;
    for (Index j = 0; j < n; ++j) {
      j_k += (x.col(j) - centroids.col(assign[static_cast<std::size_t>(j)])).squaredNorm();
    }
    out.objective_history.push_back(j_k);
    out.iterations = it;

    if (!repaired && assign == prev_assign) break;
  }

  out.labels.labels = std::move(assign);
  out.labels.k = k;
  out.objective = out.objective_history.back();
  out.centroids = std::move(centroids);
  return out;
}

template <typename Scalar>
KmeansResult<Scalar> lloyd_kmeans(const FeatureMatrix<Scalar>& x, int k, std::uint64_t seed,
                                  Index max_iterations = 300) {
  return lloyd_kmeans(x.values, k, seed, max_iterations);
}

}  // namespace kufs
