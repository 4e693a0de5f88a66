#pragma once

// Shared fixtures and independent oracles for the test suites. Everything
// here recomputes expected values through a route different from the
// library code it checks.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "kufs/feature_matrix.hpp"
#include "kufs/spectral.hpp"
#include "kufs/types.hpp"

namespace kufs_test {

using kufs::Index;
using kufs::IndexList;

inline Eigen::MatrixXd random_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = unit(rng);
  }
  return m;
}

inline kufs::FeatureMatrix<double> random_standardized(Index p, Index n, std::uint64_t seed) {
  kufs::FeatureMatrix<double> m;
  m.values = random_matrix(p, n, seed);
  return kufs::standardize_rows(m);
}

/// Haar-ish random orthogonal h x h matrix via QR of a Gaussian matrix.
inline Eigen::MatrixXd random_rotation(Index h, std::uint64_t seed) {
  const Eigen::MatrixXd g = random_matrix(h, h, seed);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  // fix signs so the factorization is unique
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < h; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

/// Random matrix with orthonormal columns (p x h).
inline Eigen::MatrixXd random_orthonormal(Index p, Index h, std::uint64_t seed) {
  const Eigen::MatrixXd g = random_matrix(p, h, seed);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return Eigen::MatrixXd(qr.householderQ()).leftCols(h);
}

/// Naive elementwise -Tr(V^T A V), the double-loop route.
inline double naive_objective(const Eigen::MatrixXd& v, const Eigen::MatrixXd& a) {
  double trace = 0;
  for (Index c = 0; c < v.cols(); ++c) {
    for (Index i = 0; i < a.rows(); ++i) {
      for (Index j = 0; j < a.cols(); ++j) {
        trace += v(i, c) * a(i, j) * v(j, c);
      }
    }
  }
  return -trace;
}

/// -Tr(S^T A S) by explicit principal-submatrix extraction.
inline double submatrix_objective(const Eigen::MatrixXd& a, const IndexList& idx) {
  const Index h = static_cast<Index>(idx.size());
  Eigen::MatrixXd sub(h, h);
  for (Index r = 0; r < h; ++r) {
    for (Index c = 0; c < h; ++c) {
      sub(r, c) = a(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
    }
  }
  return -sub.trace();
}

/// All h-subsets of {0..p-1} in lexicographic order.
inline std::vector<IndexList> all_subsets(Index p, Index h) {
  std::vector<IndexList> out;
  IndexList subset(static_cast<std::size_t>(h));
  for (Index i = 0; i < h; ++i) subset[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(subset);
    Index i = h - 1;
    while (i >= 0 && subset[static_cast<std::size_t>(i)] == p - h + i) --i;
    if (i < 0) break;
    ++subset[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < h; ++j) {
      subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

/// Exhaustive subset minimizer re-implemented with a reversed iteration
/// order and submatrix-extraction scoring.
inline IndexList reversed_exhaustive_min(const Eigen::MatrixXd& a, Index h) {
  auto subsets = all_subsets(a.rows(), h);
  std::reverse(subsets.begin(), subsets.end());
  IndexList best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (const auto& s : subsets) {
    const double obj = submatrix_objective(a, s);
    // <= so ties resolve to the lexicographically smallest (visited last)
    if (obj <= best_obj) {
      best_obj = obj;
      best = s;
    }
  }
  return best;
}

/// A random symmetric PSD matrix with unit-scale eigenvalues.
inline Eigen::MatrixXd random_psd(Index p, std::uint64_t seed) {
  const Eigen::MatrixXd g = random_matrix(p, p, seed);
  return (g * g.transpose() / static_cast<double>(p)).eval();
}

/// TargetOperator wrapper around an arbitrary symmetric PSD matrix, used to
/// drive solver steps with hand-crafted operators.
inline kufs::TargetOperator<double> operator_from_psd(const Eigen::MatrixXd& a, Index k) {
  kufs::TargetOperator<double> op;
  op.a = a;
  op.k = k;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  op.top_eigenvalue = es.eigenvalues().maxCoeff();
  Eigen::MatrixXd basis(a.rows(), k);
  Eigen::VectorXd weights(k);
  for (Index j = 0; j < k; ++j) {
    basis.col(j) = es.eigenvectors().col(a.rows() - 1 - j);
    weights(j) = std::sqrt(std::max(0.0, es.eigenvalues()(a.rows() - 1 - j)));
  }
  kufs::sign_normalize_columns(basis);
  op.basis = basis;
  op.weights = weights;
  return op;
}

}  // namespace kufs_test
