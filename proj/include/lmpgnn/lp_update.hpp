#pragma once

#include <cmath>
#include <cstdint>

#include "lmpgnn/errors.hpp"
#include "lmpgnn/graph.hpp"

namespace lmpgnn {

namespace detail {

// Counts |.|^(p-1) evaluations on forward paths. The p = 1 and p = 2 branches
// never touch pow, which is observable (and asserted in tests) as a flop-count
// difference between Sign/LMS runs and fractional-p runs.
inline thread_local std::uint64_t lp_pow_evaluations = 0;

}  // namespace detail

inline std::uint64_t lp_pow_evaluation_count() {
  return detail::lp_pow_evaluations;
}
inline void reset_lp_pow_evaluation_count() { detail::lp_pow_evaluations = 0; }

inline double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// Elementwise |e|^(p-1) o sign(e): the lp-cost descent direction. Reduces to
/// sign(e) at p = 1 and to e itself at p = 2, both without power evaluations.
inline Vec lp_error_transform(const Vec& eps, double p) {
  if (!(p >= 1.0 && p <= 2.0)) throw ParameterError("p must be in [1, 2]");
  if (p == 2.0) return eps;
  Vec out(eps.size());
  if (p == 1.0) {
    for (Eigen::Index i = 0; i < eps.size(); ++i) out[i] = sign(eps[i]);
    return out;
  }
  for (Eigen::Index i = 0; i < eps.size(); ++i) {
    out[i] = eps[i] == 0.0
                 ? 0.0
                 : std::pow(std::abs(eps[i]), p - 1.0) * sign(eps[i]);
    ++detail::lp_pow_evaluations;
  }
  return out;
}

/// Smoothed elementwise derivative of lp_error_transform,
/// (p-1)(|e| + delta)^(p-2); delta keeps the p < 2 case finite at e = 0.
/// Exactly 1 at p = 2 and exactly 0 at p = 1.
inline Vec lp_error_transform_derivative(const Vec& eps, double p,
                                         double delta) {
  if (!(p >= 1.0 && p <= 2.0)) throw ParameterError("p must be in [1, 2]");
  if (p == 2.0) return Vec::Ones(eps.size());
  if (p == 1.0) return Vec::Zero(eps.size());
  Vec out(eps.size());
  for (Eigen::Index i = 0; i < eps.size(); ++i)
    out[i] = (p - 1.0) * std::pow(std::abs(eps[i]) + delta, p - 2.0);
  return out;
}

}  // namespace lmpgnn
