#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <string>

#include "kufs/feature_matrix.hpp"
#include "kufs/types.hpp"

namespace kufs {

/// Rank-k target operator A = P_k diag(sigma^2) P_k^T built from the data's
/// truncated SVD. Symmetric PSD with rank at most k.
template <typename Scalar>
struct TargetOperator {
  Matrix<Scalar> a;
  Index k = 0;
  Scalar top_eigenvalue = 0;
  Matrix<Scalar> basis;    // p x k, orthonormal columns
  Vector<Scalar> weights;  // k leading singular values of X, decreasing

  Index p() const { return a.rows(); }
};

enum class Termination { kStableSelection, kMaxIterations };

inline std::string to_string(Termination t) {
  return t == Termination::kStableSelection ? "stable-selection" : "max-iterations";
}

/// A selected feature subset with its exact discrete objective -Tr(S^T A S).
template <typename Scalar>
struct SelectionResult {
  IndexList indices;  // sorted, strictly increasing
  Scalar objective = 0;
  Index iterations = 0;
  Termination termination = Termination::kStableSelection;
};

/// Flip column signs so each column's largest-magnitude entry is positive
/// (first such entry on ties). Makes SVD/eigenvector output reproducible.
template <typename Derived>
void sign_normalize_columns(Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  for (Index j = 0; j < m.cols(); ++j) {
    Index arg = 0;
    Scalar best = 0;
    for (Index i = 0; i < m.rows(); ++i) {
      const Scalar a = std::abs(m(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (m(arg, j) < Scalar(0)) m.derived().col(j) = -m.derived().col(j);
  }
}

template <typename Scalar>
struct SvdBasis {
  Matrix<Scalar> basis;    // p x k left singular vectors
  Vector<Scalar> weights;  // k singular values, decreasing
};

/// Top-k left singular vectors and singular values of a standardized data
/// matrix, sign-normalized.
template <typename Scalar>
SvdBasis<Scalar> truncated_left_svd(const FeatureMatrix<Scalar>& x, Index k) {
  if (!x.standardized) {
    throw std::invalid_argument("truncated_left_svd: input must be standardized");
  }
  if (k < 1 || k > std::min(x.p(), x.n())) {
    throw std::invalid_argument("truncated_left_svd: k out of range [1, min(p, n)]");
  }
  Eigen::BDCSVD<Matrix<Scalar>> svd(x.values, Eigen::ComputeThinU);
  SvdBasis<Scalar> out;
  out.basis = svd.matrixU().leftCols(k);
  out.weights = svd.singularValues().head(k);
  sign_normalize_columns(out.basis);
  return out;
}

/// Build A = P_k diag(sigma^2) P_k^T. Explicitly symmetrized so the stored
/// matrix is exactly equal to its transpose.
template <typename Scalar>
TargetOperator<Scalar> build_target_operator(const FeatureMatrix<Scalar>& x, Index k) {
  SvdBasis<Scalar> svd = truncated_left_svd(x, k);
  TargetOperator<Scalar> op;
  op.k = k;
  op.basis = std::move(svd.basis);
  op.weights = std::move(svd.weights);
  Matrix<Scalar> a =
      op.basis * op.weights.array().square().matrix().asDiagonal() * op.basis.transpose();
  op.a = ((a + a.transpose()) * Scalar(0.5)).eval();
  op.top_eigenvalue = op.weights(0) * op.weights(0);
  return op;
}

/// Relaxed objective -Tr(V^T A V).
template <typename Scalar, typename Derived>
Scalar objective_value(const Eigen::MatrixBase<Derived>& v, const TargetOperator<Scalar>& op) {
  if (v.rows() != op.p()) {
    throw std::invalid_argument("objective_value: V has wrong row count");
  }
  return -(op.a * v.derived()).cwiseProduct(v.derived()).sum();
}

/// Exact discrete objective -Tr(S^T A S) of an index subset: the negated
/// trace of A's principal submatrix, i.e. -sum of selected diagonal entries.
template <typename Scalar>
Scalar selection_objective(const TargetOperator<Scalar>& op, const IndexList& indices) {
  Scalar trace = 0;
  for (Index i : indices) {
    if (i < 0 || i >= op.p()) {
      throw std::invalid_argument("selection_objective: index out of range");
    }
    trace += op.a(i, i);
  }
  return -trace;
}

/// C(p, h) capped at `limit + 1` to avoid overflow.
inline std::uint64_t binomial_capped(Index p, Index h, std::uint64_t limit) {
  if (h < 0 || h > p) return 0;
  h = std::min(h, p - h);
  std::uint64_t count = 1;
  for (Index i = 1; i <= h; ++i) {
    // count * (p - h + i) / i is exact at every step
    count = count * static_cast<std::uint64_t>(p - h + i) / static_cast<std::uint64_t>(i);
    if (count > limit) return limit + 1;
  }
  return count;
}

/// Exhaustively minimize -Tr(S^T A S) over all h-subsets. Lexicographically
/// smallest subset wins ties. Test oracle; guarded at 10^6 subsets.
template <typename Scalar>
SelectionResult<Scalar> brute_force_oracle(const TargetOperator<Scalar>& op, Index h) {
  const Index p = op.p();
  if (h < 1 || h > p) {
    throw std::invalid_argument("brute_force_oracle: h out of range");
  }
  constexpr std::uint64_t kBudget = 1000000;
  const std::uint64_t total = binomial_capped(p, h, kBudget);
  if (total > kBudget) {
    throw SolverError("brute_force_oracle: combinatorial budget exceeded (C(p,h) > 1e6)");
  }

  IndexList subset(static_cast<std::size_t>(h));
  for (Index i = 0; i < h; ++i) subset[static_cast<std::size_t>(i)] = i;

  SelectionResult<Scalar> best;
  best.indices = subset;
  best.objective = selection_objective(op, subset);
  best.iterations = static_cast<Index>(total);
  best.termination = Termination::kStableSelection;

  // lexicographic subset enumeration; strict improvement keeps the earlier
  // (smaller) subset on ties
  while (true) {
    Index i = h - 1;
    while (i >= 0 && subset[static_cast<std::size_t>(i)] == p - h + i) --i;
    if (i < 0) break;
    ++subset[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < h; ++j) {
      subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
    }
    const Scalar obj = selection_objective(op, subset);
    if (obj < best.objective) {
      best.objective = obj;
      best.indices = subset;
    }
  }
  return best;
}

}  // namespace kufs
