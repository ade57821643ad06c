#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "lmpgnn/errors.hpp"

namespace lmpgnn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Node coordinate in degrees.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
};

/// Undirected weighted graph over N nodes, stored as a dense symmetric
/// adjacency with nonnegative weights and a zero diagonal.
class Graph {
 public:
  Graph() = default;  // empty placeholder; build through from_adjacency

  static Graph from_adjacency(Mat adjacency) {
    const auto n = adjacency.rows();
    if (n < 1 || adjacency.cols() != n)
      throw DimensionError("adjacency must be square and nonempty");
    const double asym = (adjacency - adjacency.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12)
      throw ParameterError("adjacency asymmetric by " + std::to_string(asym));
    for (Eigen::Index i = 0; i < n; ++i) {
      if (adjacency(i, i) != 0.0)
        throw ParameterError("adjacency diagonal must be zero at node " +
                             std::to_string(i));
      for (Eigen::Index j = 0; j < n; ++j)
        if (!(adjacency(i, j) >= 0.0))
          throw ParameterError("negative or non-finite edge weight at (" +
                               std::to_string(i) + "," + std::to_string(j) + ")");
    }
    // Exact symmetry from here on.
    Mat a = 0.5 * (adjacency + adjacency.transpose());
    return Graph(std::move(a));
  }

  int n_nodes() const { return static_cast<int>(adjacency_.rows()); }
  const Mat& adjacency() const { return adjacency_; }

  int edge_count() const {
    int m = 0;
    for (int i = 0; i < n_nodes(); ++i)
      for (int j = i + 1; j < n_nodes(); ++j)
        if (adjacency_(i, j) > 0.0) ++m;
    return m;
  }

 private:
  explicit Graph(Mat a) : adjacency_(std::move(a)) {}
  Mat adjacency_;
};

/// Combinatorial Laplacian D - A; rows sum to zero.
inline Mat laplacian(const Graph& g) {
  const Mat& a = g.adjacency();
  Mat l = -a;
  l.diagonal() = a.rowwise().sum();
  return l;
}

/// Great-circle distance in kilometers between two lat/lon points (haversine).
inline double great_circle_km(const GeoPoint& p, const GeoPoint& q) {
  constexpr double kEarthRadiusKm = 6371.0;
  constexpr double kDeg = M_PI / 180.0;
  const double dphi = (q.lat - p.lat) * kDeg;
  const double dlam = (q.lon - p.lon) * kDeg;
  const double s = std::sin(0.5 * dphi) * std::sin(0.5 * dphi) +
                   std::cos(p.lat * kDeg) * std::cos(q.lat * kDeg) *
                       std::sin(0.5 * dlam) * std::sin(0.5 * dlam);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(s)));
}

namespace detail {

/// Indices of the k nearest neighbors of node i, ties broken by lower index.
inline std::vector<int> k_nearest(const std::vector<GeoPoint>& coords, int i,
                                  int k) {
  const int n = static_cast<int>(coords.size());
  std::vector<std::pair<double, int>> d;
  d.reserve(n - 1);
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    const double dij = great_circle_km(coords[i], coords[j]);
    if (dij <= 0.0)
      throw DegenerateDistanceError("nodes " + std::to_string(i) + " and " +
                                    std::to_string(j) +
                                    " have coincident coordinates");
    d.emplace_back(dij, j);
  }
  std::sort(d.begin(), d.end());
  std::vector<int> out(k);
  for (int m = 0; m < k; ++m) out[m] = d[m].second;
  return out;
}

}  // namespace detail

/// Mean distance to the k nearest neighbors over all nodes; the default
/// Gaussian kernel bandwidth for build_knn_graph.
inline double mean_knn_distance(const std::vector<GeoPoint>& coords, int k) {
  const int n = static_cast<int>(coords.size());
  if (n < 2) throw ParameterError("need at least 2 nodes");
  if (k < 1 || k >= n) throw ParameterError("k must satisfy 1 <= k < N");
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j : detail::k_nearest(coords, i, k))
      sum += great_circle_km(coords[i], coords[j]);
  return sum / (static_cast<double>(n) * k);
}

/// k-nearest-neighbor graph with Gaussian kernel weights
/// exp(-d^2 / (2 bandwidth^2)); directed k-NN edges are symmetrized by
/// union-with-max. bandwidth <= 0 selects the mean k-NN distance.
inline Graph build_knn_graph(const std::vector<GeoPoint>& coords, int k,
                             double kernel_bandwidth) {
  const int n = static_cast<int>(coords.size());
  if (n < 2) throw ParameterError("need at least 2 nodes");
  if (k < 1 || k >= n) throw ParameterError("k must satisfy 1 <= k < N");
  const double bw =
      kernel_bandwidth > 0.0 ? kernel_bandwidth : mean_knn_distance(coords, k);
  Mat a = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j : detail::k_nearest(coords, i, k)) {
      const double d = great_circle_km(coords[i], coords[j]);
      const double w = std::exp(-d * d / (2.0 * bw * bw));
      a(i, j) = std::max(a(i, j), w);
      a(j, i) = a(i, j);
    }
  }
  return Graph::from_adjacency(std::move(a));
}

}  // namespace lmpgnn
