#pragma once

#include <stdexcept>
#include <string>

namespace lmpgnn {

/// Invalid numeric or structural parameter (k >= N, band_size > N, ...).
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Operand sizes do not agree.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Two supposedly distinct coordinates coincide, so distances degenerate.
struct DegenerateDistanceError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Closed-form density requested where none exists (SaS with alpha not in {1,2}).
struct UnsupportedDensityError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Text input failed to parse; carries the file and 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, long line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        path_(path),
        line_(line) {}

  const std::string& path() const noexcept { return path_; }
  long line() const noexcept { return line_; }

 private:
  std::string path_;
  long line_;
};

/// Configuration rejected; carries the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error("config key '" + key + "': " + what), key_(key) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// An estimate or parameter became non-finite during an online run.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(long timestep, int layer = -1)
      : std::runtime_error(layer < 0
                               ? "estimate diverged at timestep " +
                                     std::to_string(timestep)
                               : "estimate diverged at timestep " +
                                     std::to_string(timestep) + ", layer " +
                                     std::to_string(layer)),
        timestep_(timestep),
        layer_(layer) {}

  long timestep() const noexcept { return timestep_; }
  int layer() const noexcept { return layer_; }

 private:
  long timestep_;
  int layer_;
};

}  // namespace lmpgnn
