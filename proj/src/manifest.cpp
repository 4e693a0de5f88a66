#include "kufs/manifest.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace kufs {

namespace {

using Json = nlohmann::ordered_json;

}  // namespace

std::string to_json(const SelectionManifest& m) {
  Json j;
  j["input"] = m.input;
  j["p"] = m.p;
  j["n"] = m.n;
  j["k"] = m.k;
  j["h"] = m.h;
  j["method"] = m.method;
  j["variant"] = m.variant;
  j["mu0"] = m.mu0;
  j["rho"] = m.rho;
  j["mu_max"] = m.mu_max;
  j["max_iterations"] = m.max_iterations;
  j["stability_window"] = m.stability_window;
  j["selected"] = m.selected;
  if (!m.selected_names.empty()) j["selected_names"] = m.selected_names;
  j["objective"] = m.objective;
  j["iterations"] = m.iterations;
  j["termination"] = m.termination;
  j["version"] = m.version;
  return j.dump(2) + "\n";
}

SelectionManifest manifest_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw DataError(std::string("invalid manifest JSON: ") + e.what());
  }
  try {
    SelectionManifest m;
    m.input = j.at("input").get<std::string>();
    m.p = j.at("p").get<Index>();
    m.n = j.at("n").get<Index>();
    m.k = j.at("k").get<Index>();
    m.h = j.at("h").get<Index>();
    m.method = j.at("method").get<std::string>();
    m.variant = j.at("variant").get<std::string>();
    m.mu0 = j.at("mu0").get<double>();
    m.rho = j.at("rho").get<double>();
    m.mu_max = j.at("mu_max").get<double>();
    m.max_iterations = j.at("max_iterations").get<Index>();
    m.stability_window = j.at("stability_window").get<Index>();
    m.selected = j.at("selected").get<IndexList>();
    if (j.contains("selected_names")) {
      m.selected_names = j.at("selected_names").get<std::vector<std::string>>();
    }
    m.objective = j.at("objective").get<double>();
    m.iterations = j.at("iterations").get<Index>();
    m.termination = j.at("termination").get<std::string>();
    m.version = j.at("version").get<std::string>();
    return m;
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(std::string("manifest missing or malformed field: ") + e.what());
  }
}

void save_manifest(const SelectionManifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open manifest output file: " + path);
  out << to_json(m);
}

SelectionManifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("file not found: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return manifest_from_json(buf.str());
}

}  // namespace kufs
