#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kufs/types.hpp"

namespace kufs {

/// Feature-major data matrix: rows are features, columns are samples.
template <typename Scalar>
struct FeatureMatrix {
  Matrix<Scalar> values;
  bool standardized = false;
  /// Rows that were constant before standardization and are now all-zero.
  IndexList constant_rows;
  /// Optional feature names taken from a CSV header, one per row.
  std::vector<std::string> feature_names;

  Index p() const { return values.rows(); }
  Index n() const { return values.cols(); }
};

/// Shift every row to zero mean and scale it to unit population variance
/// (divide by n). Constant rows map to all-zero and are recorded in
/// `constant_rows`.
template <typename Scalar>
FeatureMatrix<Scalar> standardize_rows(const FeatureMatrix<Scalar>& m) {
  if (m.standardized) {
    throw std::invalid_argument("standardize_rows: input is already standardized");
  }
  if (m.p() < 1 || m.n() < 2) {
    throw std::invalid_argument("standardize_rows: need at least 1 feature and 2 samples");
  }
  FeatureMatrix<Scalar> out = m;
  out.constant_rows.clear();
  const Scalar n = static_cast<Scalar>(m.n());
  for (Index i = 0; i < m.p(); ++i) {
    const Scalar mean = m.values.row(i).mean();
    Eigen::Array<Scalar, 1, Eigen::Dynamic> centered = m.values.row(i).array() - mean;
    // second centering pass keeps the residual mean at rounding level even
    // when |mean| dwarfs the row's spread
    centered -= centered.mean();
    const Scalar variance = centered.square().sum() / n;
    const Scalar sigma = std::sqrt(variance);
    if (sigma <= Scalar(1e-12) * (Scalar(1) + std::abs(mean))) {
      out.values.row(i).setZero();
      out.constant_rows.push_back(i);
    } else {
      out.values.row(i) = centered / sigma;
    }
  }
  out.standardized = true;
  return out;
}

/// Parameters of the synthetic toy dataset: Gaussian clusters on the
/// informative rows, pure Gaussian noise on the rest.
struct ToySpec {
  int clusters = 3;
  int samples_per_cluster = 10;
  int informative_features = 2;
  int noise_features = 2;
  double cluster_separation = 6.0;
  double within_std = 0.5;
  double noise_std = 1.0;
  std::uint64_t seed = 7;
};

template <typename Scalar = double>
struct ToyData {
  FeatureMatrix<Scalar> data;
  ClusterLabels labels;
  /// Row indices of the planted informative features (the last rows).
  IndexList informative_rows;
};

namespace detail {

/// Cluster centers as a regular simplex with side `separation`, one
/// coordinate per row of the result (clusters - 1 rows, clusters columns).
/// Vertices (separation/sqrt(2)) e_j expressed in the Helmert orthonormal
/// basis of the centered hyperplane, so all pairwise center distances equal
/// `separation` exactly.
inline Matrix<double> simplex_centers(int clusters, double separation) {
  const int dims = clusters - 1;
  Matrix<double> centers = Matrix<double>::Zero(std::max(dims, 1), clusters);
  if (dims < 1) return centers;
  for (int r = 0; r < dims; ++r) {
    // Helmert row r: (1, .., 1, -(r+1), 0, ..) / sqrt((r+1)(r+2))
    const double norm = std::sqrt(static_cast<double>(r + 1) * (r + 2));
    for (int j = 0; j <= r; ++j) centers(r, j) = 1.0 / norm;
    centers(r, r + 1) = -static_cast<double>(r + 1) / norm;
  }
  centers *= separation / std::sqrt(2.0);
  return centers;
}

}  // namespace detail

/// Generate the toy dataset. Noise rows come first, informative rows last.
/// The cluster means in the informative subspace form a regular simplex
/// with side cluster_separation; informative row r carries simplex
/// coordinate r mod (clusters - 1). Columns are grouped by cluster. Entries
/// are drawn sample-major, the informative block before the noise block.
/// Pure function of the spec, including the seed.
template <typename Scalar = double>
ToyData<Scalar> generate_toy(const ToySpec& spec) {
  if (spec.informative_features < 1) {
    throw std::invalid_argument("generate_toy: informative_features must be >= 1");
  }
  if (!(spec.cluster_separation > 0) || !(spec.within_std > 0)) {
    throw std::invalid_argument("generate_toy: cluster_separation and within_std must be > 0");
  }
  if (spec.clusters < 1 || spec.samples_per_cluster < 1 || spec.noise_features < 0) {
    throw std::invalid_argument("generate_toy: counts out of range");
  }

  const Index p = spec.noise_features + spec.informative_features;
  const Index n = static_cast<Index>(spec.clusters) * spec.samples_per_cluster;

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  ToyData<Scalar> toy;
  toy.data.values.resize(p, n);
  toy.data.standardized = false;

  const Matrix<double> centers =
      detail::simplex_centers(spec.clusters, spec.cluster_separation);
  for (Index c = 0; c < n; ++c) {
    const int j = static_cast<int>(c / spec.samples_per_cluster);
    for (Index r = spec.noise_features; r < p; ++r) {
      const int coord = spec.clusters > 1
                            ? static_cast<int>(r - spec.noise_features) % (spec.clusters - 1)
                            : 0;
      const double mean = spec.clusters > 1 ? centers(coord, j) : 0.0;
      toy.data.values(r, c) = static_cast<Scalar>(mean + spec.within_std * unit(rng));
    }
  }
  for (Index c = 0; c < n; ++c) {
    for (Index r = 0; r < spec.noise_features; ++r) {
      toy.data.values(r, c) = static_cast<Scalar>(spec.noise_std * unit(rng));
    }
  }

  toy.labels.k = spec.clusters;
  toy.labels.labels.resize(static_cast<std::size_t>(n));
  for (Index c = 0; c < n; ++c) {
    toy.labels.labels[static_cast<std::size_t>(c)] =
        static_cast<int>(c / spec.samples_per_cluster);
  }
  for (Index r = spec.noise_features; r < p; ++r) {
    toy.informative_rows.push_back(r);
  }
  return toy;
}

/// Strongly correlated features: every row is a shared per-sample signal
/// plus small independent noise. Standardizing such data gives a target
/// operator with one dominant eigenvalue near p*n, the regime in which the
/// quadratic ADMM's (mu I - A) solve is ill-conditioned.
template <typename Scalar = double>
FeatureMatrix<Scalar> generate_correlated(Index p, Index n, double feature_noise,
                                          std::uint64_t seed) {
  if (p < 1 || n < 2 || !(feature_noise > 0)) {
    throw std::invalid_argument("generate_correlated: bad dimensions or noise level");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  std::vector<double> signal(static_cast<std::size_t>(n));
  for (auto& s : signal) s = unit(rng);

  FeatureMatrix<Scalar> out;
  out.values.resize(p, n);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < n; ++j) {
      out.values(i, j) =
          static_cast<Scalar>(signal[static_cast<std::size_t>(j)] + feature_noise * unit(rng));
    }
  }
  return out;
}

}  // namespace kufs
