#include "kufs/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace kufs {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no, std::size_t col_no) {
  double value = 0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || cell.empty() || !std::isfinite(value)) {
    throw DataError("non-numeric cell '" + cell + "' at line " + std::to_string(line_no) +
                    ", column " + std::to_string(col_no));
  }
  return value;
}

}  // namespace

FeatureMatrix<double> load_csv(const std::string& path, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("file not found: " + path);

  std::vector<std::string> names;
  std::vector<std::vector<double>> samples;
  std::size_t expected_cols = 0;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = has_header;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_cells(line);
    if (header_pending) {
      names = cells;
      expected_cols = cells.size();
      header_pending = false;
      continue;
    }
    if (expected_cols == 0) expected_cols = cells.size();
    if (cells.size() != expected_cols) {
      throw DataError("ragged row at line " + std::to_string(line_no) + ": expected " +
                      std::to_string(expected_cols) + " columns, got " +
                      std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      row[c] = parse_cell(cells[c], line_no, c + 1);
    }
    samples.push_back(std::move(row));
  }

  if (samples.size() < 2) {
    throw DataError("fewer than 2 samples in " + path);
  }

  FeatureMatrix<double> m;
  const Index p = static_cast<Index>(expected_cols);
  const Index n = static_cast<Index>(samples.size());
  m.values.resize(p, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < p; ++i) {
      m.values(i, j) = samples[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    }
  }
  m.standardized = false;
  m.feature_names = std::move(names);
  return m;
}

void write_csv(const FeatureMatrix<double>& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file: " + path);
  if (!m.feature_names.empty()) {
    for (std::size_t i = 0; i < m.feature_names.size(); ++i) {
      if (i > 0) out << ',';
      out << m.feature_names[i];
    }
    out << '\n';
  }
  char buf[40];
  for (Index j = 0; j < m.n(); ++j) {
    for (Index i = 0; i < m.p(); ++i) {
      if (i > 0) out << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", m.values(i, j));
      out << buf;
    }
    out << '\n';
  }
}

ClusterLabels load_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("file not found: " + path);
  std::vector<long long> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string cell = trim(line);
    if (cell.empty()) continue;
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw DataError("non-integer label '" + cell + "' at line " + std::to_string(line_no));
    }
    raw.push_back(value);
  }
  if (raw.empty()) throw DataError("empty label file: " + path);

  std::map<long long, int> remap;
  for (long long v : raw) remap.emplace(v, 0);
  int next = 0;
  for (auto& [value, id] : remap) id = next++;

  ClusterLabels labels;
  labels.k = next;
  labels.labels.reserve(raw.size());
  for (long long v : raw) labels.labels.push_back(remap[v]);
  return labels;
}

void write_labels(const ClusterLabels& labels, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file: " + path);
  for (int v : labels.labels) out << v << '\n';
}

}  // namespace kufs
