#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace kufs {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IndexList = std::vector<Index>;

/// Malformed or inconsistent input data (CSV cells, label files, ...).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A numeric step of a solver failed (degenerate direction, indefinite
/// system, combinatorial budget).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Cluster assignment of n samples; labels take values in [0, k).
struct ClusterLabels {
  std::vector<int> labels;
  int k = 0;

  Index size() const { return static_cast<Index>(labels.size()); }
};

}  // namespace kufs
