#ifndef CURVLAB_IO_HPP
#define CURVLAB_IO_HPP

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "curvlab/lie_algebra.hpp"
#include "curvlab/metrics.hpp"
#include "curvlab/report.hpp"

namespace curvlab {

inline json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Mat mat_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw Error("expected a non-empty matrix array");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols) throw Error("ragged matrix rows");
    for (int k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

/// Algebra descriptor: {"name": ..., "dim": n, "structure": c[i][j][k]}.
/// h0 is the identity in the canonical basis; the constructor revalidates
/// antisymmetry, Jacobi and ad-invariance.
inline LieAlgebra algebra_from_json(const json& j) {
  const std::string name = j.at("name").get<std::string>();
  const int dim = j.at("dim").get<int>();
  const json& structure = j.at("structure");
  if (static_cast<int>(structure.size()) != dim)
    throw Error("descriptor: structure tensor must have dim slices");
  std::vector<Mat> ad(dim, Mat::Zero(dim, dim));
  for (int i = 0; i < dim; ++i)
    for (int jj = 0; jj < dim; ++jj) {
      if (static_cast<int>(structure[i].size()) != dim ||
          static_cast<int>(structure[i][jj].size()) != dim)
        throw Error("descriptor: ragged structure tensor");
      for (int k = 0; k < dim; ++k)
        ad[i](k, jj) = structure[i][jj][k].get<double>();
    }
  return LieAlgebra(name, std::move(ad), Mat::Identity(dim, dim));
}

inline json algebra_to_json(const LieAlgebra& l) {
  json j;
  j["name"] = l.name();
  j["dim"] = l.dim();
  json structure = json::array();
  for (int i = 0; i < l.dim(); ++i) {
    json slice = json::array();
    for (int jj = 0; jj < l.dim(); ++jj) {
      json row = json::array();
      for (int k = 0; k < l.dim(); ++k) row.push_back(l.c(i, jj, k));
      slice.push_back(std::move(row));
    }
    structure.push_back(std::move(slice));
  }
  j["structure"] = std::move(structure);
  return j;
}

/// "so3" and "so4" by name, anything else as a descriptor file path.
inline LieAlgebra load_algebra(const std::string& name_or_path) {
  if (name_or_path == "so3") return build_so3();
  if (name_or_path == "so4") return build_so4();
  std::ifstream in(name_or_path);
  if (!in) throw Error("cannot open algebra descriptor " + name_or_path);
  json j;
  in >> j;
  return algebra_from_json(j);
}

/// Metric or direction file: {"algebra": ..., "phi": [[...]]} or {..., "psi": [[...]]}.
struct MetricFile {
  std::string algebra;
  std::optional<MetricForm> phi;
  std::optional<Direction> psi;
  json metadata;  // any extra keys (family, params, ...)
};

inline MetricFile metric_file_from_json(const json& j) {
  MetricFile f;
  f.algebra = j.value("algebra", std::string("so4"));
  if (j.contains("phi")) f.phi = MetricForm(mat_from_json(j.at("phi")));
  if (j.contains("psi")) f.psi = Direction(mat_from_json(j.at("psi")));
  if (!f.phi && !f.psi) throw Error("metric file needs a \"phi\" or \"psi\" matrix");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "algebra" && it.key() != "phi" && it.key() != "psi")
      f.metadata[it.key()] = it.value();
  return f;
}

inline MetricFile load_metric_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open input file " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error("malformed JSON in " + path + ": " + e.what());
  }
  return metric_file_from_json(j);
}

/// Write-to-temp, rename-on-success: no partial files on error.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.good()) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace curvlab

#endif  // CURVLAB_IO_HPP
