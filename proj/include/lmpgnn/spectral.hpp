#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "lmpgnn/errors.hpp"
#include "lmpgnn/graph.hpp"

namespace lmpgnn {

/// Orthonormal Laplacian eigenbasis: columns of eigenvectors() are the graph
/// frequencies, eigenvalues() ascend. Computed once per graph and shared.
class GftBasis {
 public:
  GftBasis(Mat eigenvectors, Vec eigenvalues)
      : u_(std::move(eigenvectors)), lambda_(std::move(eigenvalues)) {
    if (u_.rows() != u_.cols() || u_.rows() != lambda_.size())
      throw DimensionError("eigenvector/eigenvalue sizes disagree");
  }

  int n() const { return static_cast<int>(u_.rows()); }
  const Mat& eigenvectors() const { return u_; }
  const Vec& eigenvalues() const { return lambda_; }

 private:
  Mat u_;
  Vec lambda_;
};

/// Eigendecomposition of a symmetric Laplacian with a fixed sign convention:
/// in each eigenvector the entry of largest magnitude is made positive, ties
/// resolved by the lowest index. Keeps bases identical across backends.
inline GftBasis gft_basis(const Mat& l) {
  if (l.rows() != l.cols()) throw DimensionError("Laplacian must be square");
  const double scale = std::max(1.0, l.cwiseAbs().maxCoeff());
  const double asym = (l - l.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale)
    throw ParameterError("matrix asymmetric by " + std::to_string(asym));
  Eigen::SelfAdjointEigenSolver<Mat> solver(0.5 * (l + l.transpose()));
  if (solver.info() != Eigen::Success)
    throw ParameterError("eigendecomposition failed to converge");
  Mat u = solver.eigenvectors();
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
      const double m = std::abs(u(r, c));
      if (m > best + 1e-14) {  // strict improvement; ties keep the lower index
        best = m;
        arg = r;
      }
    }
    if (u(arg, c) < 0.0) u.col(c) = -u.col(c);
  }
  return GftBasis(std::move(u), solver.eigenvalues());
}

inline Vec forward_gft(const GftBasis& basis, const Vec& x) {
  if (x.size() != basis.n()) throw DimensionError("signal length != N");
  return basis.eigenvectors().transpose() * x;
}

inline Vec inverse_gft(const GftBasis& basis, const Vec& s) {
  if (s.size() != basis.n()) throw DimensionError("spectrum length != N");
  return basis.eigenvectors() * s;
}

/// Sampling set S as a 0/1 diagonal mask; application zeroes unobserved nodes.
class SamplingMask {
 public:
  SamplingMask(std::vector<int> observed, int n_nodes) : n_(n_nodes) {
    std::sort(observed.begin(), observed.end());
    observed.erase(std::unique(observed.begin(), observed.end()),
                   observed.end());
    for (int i : observed)
      if (i < 0 || i >= n_nodes)
        throw ParameterError("observed index " + std::to_string(i) +
                             " out of range");
    observed_ = std::move(observed);
  }

  static SamplingMask all(int n_nodes) {
    std::vector<int> idx(n_nodes);
    std::iota(idx.begin(), idx.end(), 0);
    return SamplingMask(std::move(idx), n_nodes);
  }

  int n() const { return n_; }
  const std::vector<int>& observed() const { return observed_; }
  int observed_count() const { return static_cast<int>(observed_.size()); }

  Vec as_diagonal() const {
    Vec d = Vec::Zero(n_);
    for (int i : observed_) d[i] = 1.0;
    return d;
  }

  Vec apply(const Vec& x) const {
    if (x.size() != n_) throw DimensionError("signal length != N");
    Vec y = Vec::Zero(n_);
    for (int i : observed_) y[i] = x[i];
    return y;
  }

 private:
  std::vector<int> observed_;
  int n_;
};

inline Vec apply_mask(const SamplingMask& mask, const Vec& x) {
  return mask.apply(x);
}

/// Diagonal spectral response; bandlimited filters are 0/1 indicators of the
/// kept frequency set.
class SpectralFilter {
 public:
  explicit SpectralFilter(Vec response) : response_(std::move(response)) {}

  static SpectralFilter bandlimited(const std::vector<int>& kept, int n) {
    Vec r = Vec::Zero(n);
    for (int f : kept) {
      if (f < 0 || f >= n)
        throw ParameterError("frequency index " + std::to_string(f) +
                             " out of range");
      r[f] = 1.0;
    }
    return SpectralFilter(std::move(r));
  }

  static SpectralFilter all_pass(int n) { return SpectralFilter(Vec::Ones(n)); }

  int n() const { return static_cast<int>(response_.size()); }
  const Vec& response() const { return response_; }

  bool is_binary() const {
    for (Eigen::Index i = 0; i < response_.size(); ++i)
      if (response_[i] != 0.0 && response_[i] != 1.0) return false;
    return true;
  }

  std::vector<int> kept_frequencies() const {
    std::vector<int> kept;
    for (Eigen::Index i = 0; i < response_.size(); ++i)
      if (response_[i] != 0.0) kept.push_back(static_cast<int>(i));
    return kept;
  }

 private:
  Vec response_;
};

/// x' = U diag(response) U^T x.
inline Vec apply_spectral_filter(const GftBasis& basis,
                                 const SpectralFilter& filt, const Vec& x) {
  if (filt.n() != basis.n()) throw DimensionError("filter length != N");
  if (x.size() != basis.n()) throw DimensionError("signal length != N");
  return basis.eigenvectors() *
         (filt.response().cwiseProduct(basis.eigenvectors().transpose() * x));
}

/// Pick the band_size frequencies with the largest mean squared GFT
/// coefficient over the training rows; ties keep the lower frequency index.
inline SpectralFilter greedy_bandlimit(const Mat& training_signals,
                                       const GftBasis& basis, int band_size) {
  if (band_size < 0 || band_size > basis.n())
    throw ParameterError("band_size must be in [0, N]");
  if (training_signals.rows() < 1)
    throw ParameterError("need at least one training signal");
  if (training_signals.cols() != basis.n())
    throw DimensionError("training signal length != N");
  const Mat spectra = training_signals * basis.eigenvectors();  // rows: U^T x_t
  Vec energy = spectra.array().square().colwise().mean();
  std::vector<int> order(basis.n());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return energy[a] > energy[b]; });
  order.resize(band_size);
  return SpectralFilter::bandlimited(order, basis.n());
}

}  // namespace lmpgnn
