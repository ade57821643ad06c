#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lmpgnn/errors.hpp"
#include "lmpgnn/graph.hpp"

namespace lmpgnn {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

inline bool parse_double(const std::string& s, double& out) {
  const char* begin = s.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end != '\0') {
    if (!std::isspace(static_cast<unsigned char>(*end))) return false;
    ++end;
  }
  return true;
}

inline bool blank(const std::string& s) {
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace detail

/// T x N matrix of comma-separated decimals, one timestep per row.
inline Mat read_signals_csv(const std::string& path, bool skip_header = false) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open");
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_header && lineno == 1) continue;
    if (detail::blank(line)) continue;
    const auto fields = detail::split_csv_line(line);
    std::vector<double> row(fields.size());
    for (size_t i = 0; i < fields.size(); ++i)
      if (!detail::parse_double(fields[i], row[i]))
        throw ParseError(path, lineno,
                         "field " + std::to_string(i + 1) + " is not a number");
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(path, lineno,
                       "row has " + std::to_string(row.size()) +
                           " fields, expected " +
                           std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path, lineno, "no data rows");
  Mat m(rows.size(), rows.front().size());
  for (size_t t = 0; t < rows.size(); ++t)
    for (size_t i = 0; i < rows[t].size(); ++i) m(t, i) = rows[t][i];
  return m;
}

/// Coordinates CSV `node_id,lat,lon`; ids must cover 0..N-1 exactly once.
/// A non-numeric first line is treated as a header.
inline std::vector<GeoPoint> read_coords_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open");
  std::vector<std::pair<long, GeoPoint>> entries;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::blank(line)) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 3)
      throw ParseError(path, lineno, "expected node_id,lat,lon");
    double id, lat, lon;
    if (!detail::parse_double(fields[0], id)) {
      if (lineno == 1) continue;  // header
      throw ParseError(path, lineno, "node_id is not a number");
    }
    if (!detail::parse_double(fields[1], lat) ||
        !detail::parse_double(fields[2], lon))
      throw ParseError(path, lineno, "lat/lon is not a number");
    entries.emplace_back(static_cast<long>(id), GeoPoint{lat, lon});
  }
  if (entries.empty()) throw ParseError(path, lineno, "no data rows");
  std::vector<GeoPoint> coords(entries.size());
  std::vector<bool> seen(entries.size(), false);
  for (const auto& [id, pt] : entries) {
    if (id < 0 || id >= static_cast<long>(entries.size()) || seen[id])
      throw ParseError(path, 0,
                       "node ids must cover 0.." +
                           std::to_string(entries.size() - 1) +
                           " exactly once (bad id " + std::to_string(id) + ")");
    seen[id] = true;
    coords[id] = pt;
  }
  return coords;
}

/// Edge-list text `i,j,weight`, 0-based, each undirected edge listed once.
/// n_nodes <= 0 infers N as max index + 1.
inline Graph read_edge_list(const std::string& path, int n_nodes = 0) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open");
  struct Edge { int i, j; double w; };
  std::vector<Edge> edges;
  int max_index = -1;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::blank(line)) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 3)
      throw ParseError(path, lineno, "expected i,j,weight");
    double di, dj, w;
    if (!detail::parse_double(fields[0], di) ||
        !detail::parse_double(fields[1], dj) ||
        !detail::parse_double(fields[2], w))
      throw ParseError(path, lineno, "non-numeric field");
    const int i = static_cast<int>(di), j = static_cast<int>(dj);
    if (i < 0 || j < 0) throw ParseError(path, lineno, "negative node index");
    if (i == j) throw ParseError(path, lineno, "self-loop not allowed");
    if (!(w >= 0.0)) throw ParseError(path, lineno, "negative weight");
    max_index = std::max(max_index, std::max(i, j));
    edges.push_back({i, j, w});
  }
  if (edges.empty()) throw ParseError(path, lineno, "no edges");
  const int n = n_nodes > 0 ? n_nodes : max_index + 1;
  if (max_index >= n)
    throw ParseError(path, 0, "node index " + std::to_string(max_index) +
                                  " exceeds declared N");
  Mat a = Mat::Zero(n, n);
  for (const Edge& e : edges) {
    a(e.i, e.j) = e.w;
    a(e.j, e.i) = e.w;
  }
  return Graph::from_adjacency(std::move(a));
}

/// Deterministic edge-list output: ascending (i, j), i < j, full precision.
inline void write_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path, 0, "cannot open for writing");
  char buf[64];
  for (int i = 0; i < g.n_nodes(); ++i)
    for (int j = i + 1; j < g.n_nodes(); ++j)
      if (g.adjacency()(i, j) > 0.0) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", i, j, g.adjacency()(i, j));
        out << buf;
      }
  if (!out) throw ParseError(path, 0, "write failed");
}

inline void write_matrix_csv(const Mat& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path, 0, "cannot open for writing");
  char buf[64];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      out << (c ? "," : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw ParseError(path, 0, "write failed");
}

}  // namespace lmpgnn
