#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "kufs/feature_matrix.hpp"
#include "kufs/types.hpp"

namespace kufs {

/// k-nearest-neighbor heat-kernel similarity graph over the samples
/// (columns) of a standardized data matrix.
template <typename Scalar>
struct SimilarityGraph {
  Matrix<Scalar> weights;  // n x n, symmetric, entries in [0, 1]
  Vector<Scalar> degree;   // row sums of weights
  Index neighbors = 0;     // k_nn used
  Scalar bandwidth = 0;    // sigma used
};

namespace detail {

/// Neighbor sets N_k(i): the k_nn nearest columns to column i, self
/// excluded, distance ties to the smaller index.
template <typename Scalar>
std::vector<IndexList> knn_sets(const Matrix<Scalar>& d2, Index k_nn) {
  const Index n = d2.rows();
  std::vector<IndexList> sets(static_cast<std::size_t>(n));
  std::vector<std::pair<Scalar, Index>> order;
  order.reserve(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    order.clear();
    for (Index j = 0; j < n; ++j) {
      if (j != i) order.emplace_back(d2(i, j), j);
    }
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return a.second < b.second;
    });
    auto& set = sets[static_cast<std::size_t>(i)];
    set.reserve(static_cast<std::size_t>(k_nn));
    for (Index r = 0; r < k_nn; ++r) set.push_back(order[static_cast<std::size_t>(r)].second);
  }
  return sets;
}

template <typename Scalar>
Matrix<Scalar> pairwise_squared_distances(const Matrix<Scalar>& x) {
  const Index n = x.cols();
  Matrix<Scalar> d2(n, n);
  for (Index i = 0; i < n; ++i) {
    d2(i, i) = 0;
    for (Index j = i + 1; j < n; ++j) {
      const Scalar d = (x.col(i) - x.col(j)).squaredNorm();
      d2(i, j) = d;
      d2(j, i) = d;
    }
  }
  return d2;
}

}  // namespace detail

/// Mean squared distance over the pairs the k_nn-rule connects; the default
/// heat-kernel bandwidth.
template <typename Scalar>
Scalar mean_connected_squared_distance(const FeatureMatrix<Scalar>& x, Index k_nn) {
  if (!x.standardized) {
    throw std::invalid_argument("mean_connected_squared_distance: input must be standardized");
  }
  const Index n = x.n();
  if (k_nn < 1 || k_nn >= n) {
    throw std::invalid_argument("mean_connected_squared_distance: k_nn out of range [1, n)");
  }
  const Matrix<Scalar> d2 = detail::pairwise_squared_distances(x.values);
  const auto sets = detail::knn_sets(d2, k_nn);
  Scalar sum = 0;
  Index count = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const auto& ni = sets[static_cast<std::size_t>(i)];
      const auto& nj = sets[static_cast<std::size_t>(j)];
      const bool connected = std::find(ni.begin(), ni.end(), j) != ni.end() ||
                             std::find(nj.begin(), nj.end(), i) != nj.end();
      if (connected) {
        sum += d2(i, j);
        ++count;
      }
    }
  }
  if (count == 0 || !(sum > Scalar(0))) return Scalar(1);  // all connected pairs coincide
  return sum / static_cast<Scalar>(count);
}

/// S_ij = exp(-||x_i - x_j||^2 / sigma) when x_i is among the k_nn nearest
/// neighbors of x_j or vice versa, else 0. Symmetric by the or-rule; the
/// diagonal is zero (a point is not its own neighbor).
template <typename Scalar>
SimilarityGraph<Scalar> knn_similarity(const FeatureMatrix<Scalar>& x, Index k_nn,
                                       Scalar bandwidth) {
  if (!x.standardized) {
    throw std::invalid_argument("knn_similarity: input must be standardized");
  }
  const Index n = x.n();
  if (k_nn < 1 || k_nn >= n) {
    throw std::invalid_argument("knn_similarity: k_nn out of range [1, n)");
  }
  if (!(bandwidth > Scalar(0))) {
    throw std::invalid_argument("knn_similarity: bandwidth must be > 0");
  }

  const Matrix<Scalar> d2 = detail::pairwise_squared_distances(x.values);
  const auto sets = detail::knn_sets(d2, k_nn);

  SimilarityGraph<Scalar> g;
  g.neighbors = k_nn;
  g.bandwidth = bandwidth;
  g.weights = Matrix<Scalar>::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const auto& ni = sets[static_cast<std::size_t>(i)];
      const auto& nj = sets[static_cast<std::size_t>(j)];
      const bool connected = std::find(ni.begin(), ni.end(), j) != ni.end() ||
                             std::find(nj.begin(), nj.end(), i) != nj.end();
      if (connected) {
        const Scalar w = std::exp(-d2(i, j) / bandwidth);
        g.weights(i, j) = w;
        g.weights(j, i) = w;
      }
    }
  }
  g.degree = g.weights.rowwise().sum();
  return g;
}

/// Laplacian Score per feature: degree-weighted centering, then
/// (f~^T L f~) / (f~^T D f~) with L = D - S. Lower is better. Features with
/// zero weighted variance score +infinity.
template <typename Scalar>
Vector<Scalar> laplacian_score(const FeatureMatrix<Scalar>& x, const SimilarityGraph<Scalar>& g) {
  const Index n = x.n();
  if (g.weights.rows() != n || g.weights.cols() != n) {
    throw std::invalid_argument("laplacian_score: graph size does not match sample count");
  }
  const Scalar dsum = g.degree.sum();
  Vector<Scalar> scores(x.p());
  for (Index f = 0; f < x.p(); ++f) {
    const auto row = x.values.row(f).transpose();
    const Scalar shift = row.dot(g.degree) / dsum;
    const Vector<Scalar> centered = row.array() - shift;
    const Scalar den = centered.array().square().matrix().dot(g.degree);
    if (!(den > Scalar(0))) {
      scores(f) = std::numeric_limits<Scalar>::infinity();
      continue;
    }
    // f~^T L f~ via the pairwise form: exact zero for component-constant
    // features and nonnegative by construction
    Scalar num = 0;
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        if (g.weights(i, j) != Scalar(0)) {
          const Scalar diff = centered(i) - centered(j);
          num += g.weights(i, j) * diff * diff;
        }
      }
    }
    scores(f) = num / den;
  }
  return scores;
}

/// Indices of the h smallest scores, ties to the smaller index, sorted.
template <typename Scalar>
IndexList rank_features_by_score(const Vector<Scalar>& scores, Index h) {
  const Index p = scores.size();
  if (h < 1 || h > p) {
    throw std::invalid_argument("rank_features_by_score: h out of range [1, p]");
  }
  IndexList order(static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (scores(a) != scores(b)) return scores(a) < scores(b);
    return a < b;
  });
  order.resize(static_cast<std::size_t>(h));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace kufs
