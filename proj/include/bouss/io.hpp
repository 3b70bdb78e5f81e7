/// @file io.hpp
/// @brief CSV / legacy-VTK output and flat key-value config parsing.
#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bouss/dofmap.hpp"
#include "bouss/mesh.hpp"
#include "bouss/sparse.hpp"

namespace bouss {

/// Full-precision scientific formatting (17 significant digits) so CSVs
/// round-trip bit-exact.
inline std::string format_full(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(16) << v;
  return os.str();
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline void write_csv(const CsvTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  for (std::size_t i = 0; i < table.header.size(); ++i)
    out << (i ? "," : "") << table.header[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

/// Legacy ASCII VTK unstructured grid with point data sampled at mesh
/// vertices: scalar "temperature" and vector "velocity".
inline void write_vtk(const Mesh& mesh, const DofMap& vel, const Vector& u,
                      const DofMap& temp, const Vector& theta, const std::string& path) {
  if (u.size() == 0 && theta.size() == 0)
    throw std::invalid_argument("write_vtk: no fields to write");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_vtk: cannot open " + path);
  out.precision(12);
  const int nv = mesh.num_vertices();
  out << "# vtk DataFile Version 3.0\nbouss-gd snapshot\nASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (const auto& v : mesh.vertices) out << v[0] << " " << v[1] << " 0\n";
  out << "CELLS " << mesh.num_triangles() << " " << 4 * mesh.num_triangles() << "\n";
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "CELL_TYPES " << mesh.num_triangles() << "\n";
  for (int t = 0; t < mesh.num_triangles(); ++t) out << "5\n";
  out << "POINT_DATA " << nv << "\n";
  // vertex dofs come first in the P2 numbering, so direct indexing works
  out << "SCALARS temperature double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < nv; ++v) out << (theta.size() ? theta[v] : 0.0) << "\n";
  out << "VECTORS velocity double\n";
  const int n = vel.n_dofs;
  for (int v = 0; v < nv; ++v)
    out << (u.size() ? u[v] : 0.0) << " " << (u.size() ? u[n + v] : 0.0) << " 0\n";
  if (!out) throw std::runtime_error("write_vtk: write failed for " + path);
}

/// Flat "key = value" config file; '#' starts a comment, lists are
/// comma-separated.
class Config {
 public:
  Config() = default;

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("Config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  static Config parse(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("Config: missing '=' on line " + std::to_string(lineno));
      c.values_[trim(trimmed.substr(0, eq))] = trim(trimmed.substr(eq + 1));
    }
    return c;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }
  double get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : std::stod(it->second);
  }
  int get_int(const std::string& key, int fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : std::stoi(it->second);
  }
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::istringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(trim(item)));
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }
  std::map<std::string, std::string> values_;
};

}  // namespace bouss
