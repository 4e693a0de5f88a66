#pragma once

#include <string>
#include <vector>

#include "kufs/types.hpp"

namespace kufs {

/// The result document a `select` run writes: full configuration plus the
/// selected features. Round-trips losslessly through JSON.
struct SelectionManifest {
  std::string input;
  Index p = 0;
  Index n = 0;
  Index k = 0;
  Index h = 0;
  std::string method;   // "kufs" | "laplacian"
  std::string variant;  // "bilinear" | "quadratic"
  double mu0 = 0;
  double rho = 0;
  double mu_max = 0;
  Index max_iterations = 0;
  Index stability_window = 0;
  IndexList selected;                       // 0-based, sorted
  std::vector<std::string> selected_names;  // present when the CSV had a header
  double objective = 0;
  Index iterations = 0;
  std::string termination;  // "stable-selection" | "max-iterations" | "none"
  std::string version;

  bool operator==(const SelectionManifest&) const = default;
};

std::string to_json(const SelectionManifest& m);
SelectionManifest manifest_from_json(const std::string& text);

void save_manifest(const SelectionManifest& m, const std::string& path);
SelectionManifest load_manifest(const std::string& path);

}  // namespace kufs
