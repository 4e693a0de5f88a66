#pragma once

#include <string>

#include "kufs/feature_matrix.hpp"
#include "kufs/types.hpp"

namespace kufs {

/// Load a sample-major CSV (one sample per line) into a feature-major
/// matrix: the result is the transpose of the file grid. With `has_header`
/// the first line provides feature names.
FeatureMatrix<double> load_csv(const std::string& path, bool has_header);

/// Inverse of load_csv: samples as lines, 17 significant digits, header
/// line written when the matrix carries feature names.
void write_csv(const FeatureMatrix<double>& m, const std::string& path);

/// One integer label per line, aligned with sample order. Distinct values
/// are remapped to 0..k-1 in sorted order.
ClusterLabels load_labels(const std::string& path);

void write_labels(const ClusterLabels& labels, const std::string& path);

}  // namespace kufs
