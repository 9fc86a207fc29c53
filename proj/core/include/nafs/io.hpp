#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nafs/graph.hpp"
#include "nafs/matrix.hpp"

namespace nafs {

// Binary matrix format: 8-byte magic "NAFSMAT1", then rows and cols as
// little-endian uint64, then row-major IEEE-754 doubles, little-endian.
inline constexpr char kMatrixMagic[8] = {'N', 'A', 'F', 'S', 'M', 'A', 'T', '1'};

void save_matrix(const FeatureMatrix& m, const std::string& path);

// Accepts the binary format (detected by magic) or CSV with one node per
// row. Non-finite entries are rejected.
FeatureMatrix load_features(const std::string& path);

// One integer class id per line; line number = node id.
std::vector<int> load_labels(const std::string& path);

struct DatasetManifest {
  std::string name;
  std::string edge_path;
  std::string feature_path;
  std::string label_path;  // empty when absent
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t f = 0;
  std::int64_t num_classes = 0;
};

// Relative paths in the manifest resolve against the manifest's directory.
DatasetManifest load_manifest(const std::string& path);

struct Dataset {
  Graph graph;
  FeatureMatrix features;
  std::vector<int> labels;  // empty when the manifest has no label file
  DatasetManifest manifest;
};

// Loads everything the manifest names and fails if recorded n/m/f disagree
// with the loaded artifacts.
Dataset load_dataset(const DatasetManifest& manifest);

struct MetricReport {
  std::string task;  // "clustering" | "linkpred" | ...
  std::map<std::string, double> metrics;
  std::map<std::string, std::string> config;
  std::optional<double> runtime_seconds;
};

// Canonical form used everywhere a double is serialized: 17 significant
// digits, shortest-equivalent exponent form via %g, and a trailing ".0"
// for integral values so floats stay recognizably floats.
std::string format_double(double v);

// Canonical JSON: one line, sorted keys, format_double for numbers,
// newline-terminated. Identical reports serialize to identical bytes.
std::string report_to_json(const MetricReport& report);
void write_report(const MetricReport& report, const std::string& path);

}  // namespace nafs
