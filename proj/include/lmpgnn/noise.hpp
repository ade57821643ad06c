#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

#include "lmpgnn/errors.hpp"
#include "lmpgnn/graph.hpp"
#include "lmpgnn/rng.hpp"

namespace lmpgnn {

enum class NoiseFamily { gaussian, sas, cauchy, student_t, laplace };

inline const char* to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::gaussian: return "gaussian";
    case NoiseFamily::sas: return "sas";
    case NoiseFamily::cauchy: return "cauchy";
    case NoiseFamily::student_t: return "student_t";
    case NoiseFamily::laplace: return "laplace";
  }
  return "?";
}

inline NoiseFamily noise_family_from_string(const std::string& s) {
  if (s == "gaussian") return NoiseFamily::gaussian;
  if (s == "sas") return NoiseFamily::sas;
  if (s == "cauchy") return NoiseFamily::cauchy;
  if (s == "student_t") return NoiseFamily::student_t;
  if (s == "laplace") return NoiseFamily::laplace;
  throw ParameterError("unknown noise family '" + s + "'");
}

/// Distribution parameters. `scale` is sigma (gaussian), gamma (sas, cauchy),
/// b (laplace) or a plain multiplier (student_t, default 1).
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::gaussian;
  double location = 0.0;
  double scale = 1.0;
  double alpha = 2.0;  // sas only, in (0, 2]
  double nu = 1.0;     // student_t only, > 0

  void validate() const {
    if (!std::isfinite(location)) throw ParameterError("location must be finite");
    if (!(scale > 0.0) || !std::isfinite(scale))
      throw ParameterError("scale must be positive");
    if (family == NoiseFamily::sas && !(alpha > 0.0 && alpha <= 2.0))
      throw ParameterError("alpha must be in (0, 2]");
    if (family == NoiseFamily::student_t && (!(nu > 0.0) || !std::isfinite(nu)))
      throw ParameterError("nu must be positive");
  }
};

namespace detail {

/// Standard SaS variate (characteristic function exp(-|x|^alpha)) by the
/// Chambers-Mallows-Stuck transform. Exact at the alpha = 1 and alpha = 2
/// endpoints as well.
inline double sample_standard_sas(double alpha, Rng& rng) {
  const double v = M_PI * (rng.uniform() - 0.5);  // uniform on (-pi/2, pi/2)
  const double w = rng.exponential();
  if (alpha == 1.0) return std::tan(v);
  const double t = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha);
  const double s = std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
  return t * s;
}

/// Standard Student's t variate with nu degrees of freedom, polar method
/// (Bailey 1994).
inline double sample_standard_t(double nu, Rng& rng) {
  for (;;) {
    const double u = 2.0 * rng.uniform() - 1.0;
    const double v = 2.0 * rng.uniform() - 1.0;
    const double w = u * u + v * v;
    if (w > 0.0 && w < 1.0)
      return u * std::sqrt(nu * (std::pow(w, -2.0 / nu) - 1.0) / w);
  }
}

}  // namespace detail

/// One draw from the given running stream.
inline double sample_one(const NoiseSpec& spec, Rng& rng) {
  switch (spec.family) {
    case NoiseFamily::gaussian:
      return spec.location + spec.scale * rng.normal();
    case NoiseFamily::sas:
      return spec.location + std::pow(spec.scale, 1.0 / spec.alpha) *
                                 detail::sample_standard_sas(spec.alpha, rng);
    case NoiseFamily::cauchy:
      return spec.location + spec.scale * std::tan(M_PI * (rng.uniform() - 0.5));
    case NoiseFamily::student_t:
      return spec.location + spec.scale * detail::sample_standard_t(spec.nu, rng);
    case NoiseFamily::laplace: {
      const double u = rng.uniform() - 0.5;
      const double mag = std::log(1.0 - 2.0 * std::abs(u));
      return spec.location + (u < 0.0 ? spec.scale * mag : -spec.scale * mag);
    }
  }
  throw ParameterError("invalid noise family");
}

/// n i.i.d. draws, deterministic for a given seed.
inline Vec sample(const NoiseSpec& spec, int n, std::uint64_t rng_seed) {
  spec.validate();
  if (n < 1) throw ParameterError("sample count must be >= 1");
  Rng rng(rng_seed);
  Vec out(n);
  for (int i = 0; i < n; ++i) out[i] = sample_one(spec, rng);
  return out;
}

/// Closed-form density. SaS only has one at alpha = 2 (Gaussian with
/// sigma^2 = 2 gamma) and alpha = 1 (Cauchy with the same gamma).
inline double pdf(const NoiseSpec& spec, double t) {
  spec.validate();
  const double z = t - spec.location;
  switch (spec.family) {
    case NoiseFamily::gaussian: {
      const double s = spec.scale;
      return std::exp(-0.5 * (z / s) * (z / s)) / (s * std::sqrt(2.0 * M_PI));
    }
    case NoiseFamily::sas: {
      if (spec.alpha == 2.0) {
        const double s = std::sqrt(2.0 * spec.scale);
        return std::exp(-0.5 * (z / s) * (z / s)) / (s * std::sqrt(2.0 * M_PI));
      }
      if (spec.alpha == 1.0) {
        const double g = spec.scale;
        return 1.0 / (M_PI * g * (1.0 + (z / g) * (z / g)));
      }
      throw UnsupportedDensityError(
          "SaS density has no closed form for alpha = " +
          std::to_string(spec.alpha));
    }
    case NoiseFamily::cauchy: {
      const double g = spec.scale;
      return 1.0 / (M_PI * g * (1.0 + (z / g) * (z / g)));
    }
    case NoiseFamily::student_t: {
      const double nu = spec.nu;
      const double x = z / spec.scale;
      const double log_norm = std::lgamma(0.5 * (nu + 1.0)) -
                              std::lgamma(0.5 * nu) -
                              0.5 * std::log(nu * M_PI);
      return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(x * x / nu)) /
             spec.scale;
    }
    case NoiseFamily::laplace:
      return std::exp(-std::abs(z) / spec.scale) / (2.0 * spec.scale);
  }
  throw ParameterError("invalid noise family");
}

/// SaS characteristic function exp(j mu x - gamma |x|^alpha).
inline std::complex<double> characteristic_function(const NoiseSpec& spec,
                                                    double x) {
  spec.validate();
  if (spec.family != NoiseFamily::sas)
    throw ParameterError("characteristic_function is defined for the sas family");
  const double mag = std::exp(-spec.scale * std::pow(std::abs(x), spec.alpha));
  return std::complex<double>(mag * std::cos(spec.location * x),
                              mag * std::sin(spec.location * x));
}

}  // namespace lmpgnn
