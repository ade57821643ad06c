#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lmpgnn/errors.hpp"
#include "lmpgnn/graph.hpp"
#include "lmpgnn/lp_update.hpp"
#include "lmpgnn/spectral.hpp"

namespace lmpgnn {

// Classical graph adaptive filters with a fixed predefined bandlimited filter:
// x[t+1] = x[t] + mu * U S g(eps[t]) with eps[t] = D_S(y[t] - x[t]).
// The normalized variants additionally divide each kept spectral coefficient
// by a running per-frequency energy estimate of the error spectrum.

enum class FilterMethod { glms, gnlms, glmp, gnlmp, gsign };

inline const char* to_string(FilterMethod m) {
  switch (m) {
    case FilterMethod::glms: return "glms";
    case FilterMethod::gnlms: return "gnlms";
    case FilterMethod::glmp: return "glmp";
    case FilterMethod::gnlmp: return "gnlmp";
    case FilterMethod::gsign: return "gsign";
  }
  return "?";
}

inline FilterMethod filter_method_from_string(const std::string& s) {
  if (s == "glms") return FilterMethod::glms;
  if (s == "gnlms") return FilterMethod::gnlms;
  if (s == "glmp") return FilterMethod::glmp;
  if (s == "gnlmp") return FilterMethod::gnlmp;
  if (s == "gsign") return FilterMethod::gsign;
  throw ParameterError("unknown adaptive filter method '" + s + "'");
}

struct AdaptiveFilterConfig {
  FilterMethod method = FilterMethod::glms;
  double step_size = 0.5;  // mu
  double p = 2.0;          // glmp/gnlmp only
  SpectralFilter band_filter{Vec()};
  double norm_floor = 1e-6;        // delta_norm
  double forgetting = 0.9;         // energy estimate forgetting factor

  void validate() const {
    if (!(step_size > 0.0)) throw ParameterError("step size mu must be positive");
    if (!(p >= 1.0 && p <= 2.0)) throw ParameterError("p must be in [1, 2]");
    if (!(norm_floor > 0.0)) throw ParameterError("norm_floor must be positive");
    if (!(forgetting > 0.0 && forgetting < 1.0))
      throw ParameterError("forgetting factor must be in (0, 1)");
  }

  bool normalized() const {
    return method == FilterMethod::gnlms || method == FilterMethod::gnlmp;
  }
};

struct FilterState {
  Vec estimate;
  Vec spectral_energy;  // per-frequency EW mean of the error spectrum squared
  long timestep = 0;

  static FilterState initial(Vec estimate0) {
    FilterState s;
    s.spectral_energy = Vec::Zero(estimate0.size());
    s.estimate = std::move(estimate0);
    return s;
  }
};

/// eps[t] = D_S(y - x); zero at unobserved nodes.
inline Vec error_term(const FilterState& state, const Vec& y,
                      const SamplingMask& mask) {
  if (y.size() != state.estimate.size())
    throw DimensionError("observation length != estimate length");
  return mask.apply(y - state.estimate);
}

namespace detail {

inline Vec method_update_direction(const AdaptiveFilterConfig& cfg,
                                   const Vec& eps) {
  switch (cfg.method) {
    case FilterMethod::glms:
    case FilterMethod::gnlms:
      return eps;
    case FilterMethod::glmp:
    case FilterMethod::gnlmp:
      return lp_error_transform(eps, cfg.p);
    case FilterMethod::gsign: {
      Vec g(eps.size());
      for (Eigen::Index i = 0; i < eps.size(); ++i) g[i] = sign(eps[i]);
      return g;
    }
  }
  throw ParameterError("invalid filter method");
}

}  // namespace detail

/// One online update. Normalized variants refresh the spectral energy
/// estimate from the current error before using it.
inline FilterState step(const AdaptiveFilterConfig& cfg,
                        const FilterState& state, const Vec& y,
                        const SamplingMask& mask, const GftBasis& basis) {
  cfg.validate();
  if (cfg.band_filter.n() != basis.n())
    throw DimensionError("band filter was built for a different basis size");
  const Vec eps = error_term(state, y, mask);
  const Vec g = detail::method_update_direction(cfg, eps);
  const Mat& u = basis.eigenvectors();

  FilterState next;
  next.timestep = state.timestep + 1;
  Vec coef = cfg.band_filter.response().cwiseProduct(u.transpose() * g);
  if (cfg.normalized()) {
    const Vec err_spectrum = u.transpose() * eps;
    next.spectral_energy = cfg.forgetting * state.spectral_energy +
                           (1.0 - cfg.forgetting) * err_spectrum.array().square().matrix();
    for (Eigen::Index k = 0; k < coef.size(); ++k)
      coef[k] /= std::max(next.spectral_energy[k], cfg.norm_floor);
  } else {
    next.spectral_energy = state.spectral_energy;
  }
  next.estimate = state.estimate + cfg.step_size * (u * coef);
  if (!next.estimate.allFinite()) throw DivergenceError(state.timestep);
  return next;
}

/// Run the filter over a stream; out[t] is the estimate available before
/// ingesting y[t] (one-step-ahead predictions).
inline std::vector<Vec> run_online(const AdaptiveFilterConfig& cfg,
                                   const Vec& initial_estimate,
                                   std::span<const Vec> observations,
                                   const SamplingMask& mask,
                                   const GftBasis& basis) {
  std::vector<Vec> predictions;
  predictions.reserve(observations.size());
  FilterState state = FilterState::initial(initial_estimate);
  for (const Vec& y : observations) {
    predictions.push_back(state.estimate);
    state = step(cfg, state, y, mask, basis);
  }
  return predictions;
}

}  // namespace lmpgnn
