#include "nafs/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nafs/error.hpp"

namespace nafs {

namespace {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

std::uint64_t byteswap64(std::uint64_t v) {
  v = ((v & 0x00FF00FF00FF00FFull) << 8) | ((v >> 8) & 0x00FF00FF00FF00FFull);
  v = ((v & 0x0000FFFF0000FFFFull) << 16) | ((v >> 16) & 0x0000FFFF0000FFFFull);
  return (v << 32) | (v >> 32);
}

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) return byteswap64(v);
  return v;
}

void put_u64(std::ostream& out, std::uint64_t v) {
  const std::uint64_t le = to_le(v);
  out.write(reinterpret_cast<const char*>(&le), sizeof(le));
}

bool get_u64(std::istream& in, std::uint64_t& v) {
  std::uint64_t le = 0;
  if (!in.read(reinterpret_cast<char*>(&le), sizeof(le))) return false;
  v = to_le(le);
  return true;
}

FeatureMatrix load_binary_matrix(std::ifstream& in, const std::string& path) {
  std::uint64_t rows = 0, cols = 0;
  if (!get_u64(in, rows) || !get_u64(in, cols))
    throw DataError(path + ": truncated matrix header");
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 31;
  if (rows > kLimit || cols > kLimit || (cols != 0 && rows > kLimit / std::max<std::uint64_t>(cols, 1)))
    throw DataError(path + ": matrix dimensions overflow");

  FeatureMatrix m(static_cast<std::int64_t>(rows), static_cast<std::int64_t>(cols));
  const std::uint64_t expected = rows * cols * sizeof(double);
  auto payload = m.data();
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(expected));
  const std::uint64_t got = static_cast<std::uint64_t>(in.gcount());
  if (got != expected) {
    throw DataError(path + ": truncated matrix payload: expected " +
                    std::to_string(expected) + " bytes, found " + std::to_string(got));
  }
  if constexpr (std::endian::native == std::endian::big) {
    for (double& v : payload) {
      const std::uint64_t bits = byteswap64(std::bit_cast<std::uint64_t>(v));
      v = std::bit_cast<double>(bits);
    }
  }
  char extra;
  if (in.read(&extra, 1))
    throw DataError(path + ": trailing bytes after matrix payload");
  return m;
}

FeatureMatrix load_csv_matrix(std::ifstream& in, const std::string& path) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::int64_t line_no = 0;
  std::int64_t cols = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r,") == std::string::npos) continue;

    std::vector<double> row;
    const char* p = line.c_str();
    const char* end = p + line.size();
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t' || *p == ',' || *p == '\r')) ++p;
      if (p >= end) break;
      char* after = nullptr;
      const double v = std::strtod(p, &after);
      if (after == p)
        throw DataError(path + ", line " + std::to_string(line_no) + ": not a number");
      row.push_back(v);
      p = after;
    }
    if (cols == -1) {
      cols = static_cast<std::int64_t>(row.size());
    } else if (static_cast<std::int64_t>(row.size()) != cols) {
      throw DataError(path + ", line " + std::to_string(line_no) + ": expected " +
                      std::to_string(cols) + " values, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  FeatureMatrix m(static_cast<std::int64_t>(rows.size()), std::max<std::int64_t>(cols, 0));
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(rows[i].begin(), rows[i].end(), m.row(static_cast<std::int64_t>(i)).begin());
  return m;
}

}  // namespace

void save_matrix(const FeatureMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  out.write(kMatrixMagic, sizeof(kMatrixMagic));
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  if constexpr (std::endian::native == std::endian::little) {
    const auto payload = m.data();
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size() * sizeof(double)));
  } else {
    for (double v : m.data()) {
      const std::uint64_t bits = byteswap64(std::bit_cast<std::uint64_t>(v));
      out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
    }
  }
  if (!out) throw DataError("write failed: " + path);
}

FeatureMatrix load_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open feature file: " + path);

  char magic[sizeof(kMatrixMagic)] = {};
  in.read(magic, sizeof(magic));
  FeatureMatrix m;
  if (in.gcount() == sizeof(magic) && std::memcmp(magic, kMatrixMagic, sizeof(magic)) == 0) {
    m = load_binary_matrix(in, path);
  } else {
    in.clear();
    in.seekg(0);
    m = load_csv_matrix(in, path);
  }
  if (!m.all_finite()) throw DataError(path + ": non-finite feature values");
  return m;
}

std::vector<int> load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open label file: " + path);
  std::vector<int> labels;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      // Only a trailing blank line is tolerated.
      std::string rest;
      while (std::getline(in, rest)) {
        if (rest.find_first_not_of(" \t\r") != std::string::npos)
          throw DataError(path + ", line " + std::to_string(line_no) + ": blank label line");
      }
      break;
    }
    std::istringstream fields(line);
    long long value;
    std::string extra;
    if (!(fields >> value) || (fields >> extra))
      throw DataError(path + ", line " + std::to_string(line_no) + ": expected one integer");
    labels.push_back(static_cast<int>(value));
  }
  return labels;
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": invalid JSON: " + e.what());
  }

  const auto base = std::filesystem::path(path).parent_path();
  const auto resolve = [&](const std::string& p) {
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (base / fp).string();
  };

  DatasetManifest manifest;
  try {
    manifest.name = j.at("name").get<std::string>();
    manifest.edge_path = resolve(j.at("edge_path").get<std::string>());
    manifest.feature_path = resolve(j.at("feature_path").get<std::string>());
    if (j.contains("label_path") && !j["label_path"].is_null())
      manifest.label_path = resolve(j["label_path"].get<std::string>());
    manifest.n = j.at("n").get<std::int64_t>();
    manifest.m = j.at("m").get<std::int64_t>();
    manifest.f = j.at("f").get<std::int64_t>();
    if (j.contains("num_classes")) manifest.num_classes = j["num_classes"].get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": bad manifest field: " + e.what());
  }
  return manifest;
}

Dataset load_dataset(const DatasetManifest& manifest) {
  Dataset d;
  d.manifest = manifest;
  d.graph = load_graph(manifest.edge_path, manifest.n);
  if (d.graph.num_edges() != manifest.m) {
    throw DataError(manifest.name + ": manifest records m=" + std::to_string(manifest.m) +
                    " but graph has " + std::to_string(d.graph.num_edges()) + " edges");
  }
  d.features = load_features(manifest.feature_path);
  if (d.features.rows() != manifest.n || d.features.cols() != manifest.f) {
    throw DataError(manifest.name + ": manifest records " + std::to_string(manifest.n) +
                    "x" + std::to_string(manifest.f) + " features but file is " +
                    std::to_string(d.features.rows()) + "x" +
                    std::to_string(d.features.cols()));
  }
  if (!manifest.label_path.empty()) {
    d.labels = load_labels(manifest.label_path);
    if (static_cast<std::int64_t>(d.labels.size()) != manifest.n) {
      throw DataError(manifest.name + ": label count " + std::to_string(d.labels.size()) +
                      " does not match n=" + std::to_string(manifest.n));
    }
  }
  return d;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::string s(buf);
  // Keep floats recognizable: integral values get a trailing ".0".
  if (s.find_first_of(".eEnN") == std::string::npos) s += ".0";
  return s;
}

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

}  // namespace

std::string report_to_json(const MetricReport& report) {
  // std::map keeps keys sorted; emission order is fixed by construction.
  std::ostringstream out;
  out << "{\"config\": {";
  bool first = true;
  for (const auto& [k, v] : report.config) {
    if (!first) out << ", ";
    first = false;
    out << '"' << json_escape(k) << "\": \"" << json_escape(v) << '"';
  }
  out << "}, \"metrics\": {";
  first = true;
  for (const auto& [k, v] : report.metrics) {
    if (!first) out << ", ";
    first = false;
    out << '"' << json_escape(k) << "\": " << format_double(v);
  }
  out << "}";
  if (report.runtime_seconds)
    out << ", \"runtime_seconds\": " << format_double(*report.runtime_seconds);
  out << ", \"task\": \"" << json_escape(report.task) << "\"}\n";
  return out.str();
}

void write_report(const MetricReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << report_to_json(report);
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace nafs
