#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "kufs/kmeans.hpp"
#include "kufs/types.hpp"

namespace kufs {

/// Minimum-cost perfect matching on a square cost matrix (Kuhn-Munkres with
/// potentials, O(k^3)). Returns perm with perm[row] = assigned column.
template <typename Derived>
std::vector<Index> hungarian_assignment(const Eigen::MatrixBase<Derived>& cost) {
  using Scalar = typename Derived::Scalar;
  const Index n = cost.rows();
  if (n != cost.cols()) {
    throw std::invalid_argument("hungarian_assignment: cost matrix must be square");
  }
  if (!cost.allFinite()) {
    throw std::invalid_argument("hungarian_assignment: cost matrix must be finite");
  }
  const Scalar kInf = std::numeric_limits<Scalar>::infinity();

  // 1-based arrays with a dummy row/column 0
  std::vector<Scalar> u(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Scalar> v(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Index> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Index> way(static_cast<std::size_t>(n) + 1, 0);

  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::vector<Scalar> minv(static_cast<std::size_t>(n) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Index i0 = p[static_cast<std::size_t>(j0)];
      Scalar delta = kInf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const Scalar cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<Index> perm(static_cast<std::size_t>(n), 0);
  for (Index j = 1; j <= n; ++j) {
    perm[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  }
  return perm;
}

namespace detail {

inline Matrix<double> confusion_matrix(const ClusterLabels& pred, const ClusterLabels& truth,
                                       int kk) {
  Matrix<double> c = Matrix<double>::Zero(kk, kk);
  for (std::size_t i = 0; i < pred.labels.size(); ++i) {
    c(pred.labels[i], truth.labels[i]) += 1.0;
  }
  return c;
}

inline void check_same_length(const ClusterLabels& pred, const ClusterLabels& truth) {
  if (pred.labels.size() != truth.labels.size() || pred.labels.empty()) {
    throw std::invalid_argument("labelings must be nonempty and of equal length");
  }
}

}  // namespace detail

/// Clustering accuracy: best-permutation matched fraction via the Hungarian
/// algorithm on the (padded square) confusion matrix.
inline double clustering_accuracy(const ClusterLabels& pred, const ClusterLabels& truth) {
  detail::check_same_length(pred, truth);
  const int kk = std::max(pred.k, truth.k);
  const Matrix<double> confusion = detail::confusion_matrix(pred, truth, kk);
  const std::vector<Index> perm = hungarian_assignment((-confusion).eval());
  double matched = 0;
  for (int i = 0; i < kk; ++i) matched += confusion(i, perm[static_cast<std::size_t>(i)]);
  return matched / static_cast<double>(pred.labels.size());
}

/// Normalized mutual information I(pred;truth)/sqrt(H(pred) H(truth)) with
/// natural logs. Identical partitions (up to relabeling) give exactly 1;
/// if exactly one partition has zero entropy the value is 0.
inline double normalized_mutual_info(const ClusterLabels& pred, const ClusterLabels& truth) {
  detail::check_same_length(pred, truth);
  const double n = static_cast<double>(pred.labels.size());
  const int kp = pred.k;
  const int kt = truth.k;
  Matrix<double> joint = Matrix<double>::Zero(kp, kt);
  for (std::size_t i = 0; i < pred.labels.size(); ++i) {
    joint(pred.labels[i], truth.labels[i]) += 1.0;
  }
  const Vector<double> rows = joint.rowwise().sum();
  const Vector<double> cols = joint.colwise().sum();

  // partitions identical up to relabeling: at most one nonzero per row and
  // per column of the contingency table
  bool relabeling = true;
  for (int i = 0; i < kp && relabeling; ++i) {
    int nz = 0;
    for (int j = 0; j < kt; ++j) nz += joint(i, j) > 0 ? 1 : 0;
    if (nz > 1) relabeling = false;
  }
  for (int j = 0; j < kt && relabeling; ++j) {
    int nz = 0;
    for (int i = 0; i < kp; ++i) nz += joint(i, j) > 0 ? 1 : 0;
    if (nz > 1) relabeling = false;
  }
  if (relabeling) return 1.0;

  // sum every term multiset in sorted order so relabeling permutations
  // cannot perturb the result by rounding
  auto sorted_sum = [](std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end());
    double s = 0;
    for (double t : terms) s += t;
    return s;
  };

  std::vector<double> h_terms;
  for (int i = 0; i < kp; ++i) {
    if (rows(i) > 0) h_terms.push_back(-rows(i) / n * std::log(rows(i) / n));
  }
  const double h_pred = sorted_sum(h_terms);
  h_terms.clear();
  for (int j = 0; j < kt; ++j) {
    if (cols(j) > 0) h_terms.push_back(-cols(j) / n * std::log(cols(j) / n));
  }
  const double h_truth = sorted_sum(h_terms);
  if (h_pred == 0.0 || h_truth == 0.0) return 0.0;

  std::vector<double> mi_terms;
  for (int i = 0; i < kp; ++i) {
    for (int j = 0; j < kt; ++j) {
      if (joint(i, j) > 0) {
        mi_terms.push_back(joint(i, j) / n * std::log(n * joint(i, j) / (rows(i) * cols(j))));
      }
    }
  }
  const double mi = sorted_sum(mi_terms);
  return std::clamp(mi / std::sqrt(h_pred * h_truth), 0.0, 1.0);
}

struct EvalReport {
  double acc_mean = 0;
  double acc_std = 0;
  double nmi_mean = 0;
  double nmi_std = 0;
  int repeats = 0;
  std::uint64_t seed = 0;
};

/// Cluster the selected-feature submatrix `repeats` times with seeds
/// seed, seed+1, ..., score each run with ACC and NMI against the truth,
/// and report means with population standard deviations.
template <typename Scalar>
EvalReport evaluate_selection(const FeatureMatrix<Scalar>& x, const IndexList& indices,
                              const ClusterLabels& truth, int repeats, std::uint64_t seed) {
  if (repeats < 1) throw std::invalid_argument("evaluate_selection: repeats must be >= 1");
  if (truth.size() != x.n()) {
    throw std::invalid_argument("evaluate_selection: label count does not match sample count");
  }
  if (indices.empty()) throw std::invalid_argument("evaluate_selection: empty selection");
  Matrix<Scalar> sub(static_cast<Index>(indices.size()), x.n());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] < 0 || indices[r] >= x.p()) {
      throw std::invalid_argument("evaluate_selection: feature index out of range");
    }
    sub.row(static_cast<Index>(r)) = x.values.row(indices[r]);
  }

  std::vector<double> accs, nmis;
  accs.reserve(static_cast<std::size_t>(repeats));
  nmis.reserve(static_cast<std::size_t>(repeats));
  for (int r = 0; r < repeats; ++r) {
    const KmeansResult<Scalar> km =
        lloyd_kmeans(sub, truth.k, seed + static_cast<std::uint64_t>(r));
    accs.push_back(clustering_accuracy(km.labels, truth));
    nmis.push_back(normalized_mutual_info(km.labels, truth));
  }

  auto mean_of = [](const std::vector<double>& xs) {
    double s = 0;
    for (double v : xs) s += v;
    return s / static_cast<double>(xs.size());
  };
  auto pop_std_of = [](const std::vector<double>& xs, double mean) {
    double s = 0;
    for (double v : xs) s += (v - mean) * (v - mean);
    return std::sqrt(s / static_cast<double>(xs.size()));
  };

  EvalReport rep;
  rep.repeats = repeats;
  rep.seed = seed;
  rep.acc_mean = mean_of(accs);
  rep.acc_std = pop_std_of(accs, rep.acc_mean);
  rep.nmi_mean = mean_of(nmis);
  rep.nmi_std = pop_std_of(nmis, rep.nmi_mean);
  return rep;
}

}  // namespace kufs
