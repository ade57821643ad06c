#pragma once

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "lmpgnn/errors.hpp"
#include "lmpgnn/experiment.hpp"
#include "lmpgnn/noise.hpp"

namespace lmpgnn {

// Experiment configuration file: a single JSON object. Unknown keys are
// rejected by name so typos never silently fall back to defaults. Values can
// be overridden from the command line with dotted paths, e.g.
// "noise.alpha=1.4" or "methods.0.mu=0.2".

namespace detail {

using json = nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::string& prefix,
                                const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key))
      throw ConfigError(prefix.empty() ? key : prefix + "." + key,
                        "unknown key");
}

template <typename T>
inline T require(const json& obj, const std::string& prefix,
                 const std::string& key, const char* type_name) {
  if (!obj.contains(key))
    throw ConfigError(prefix.empty() ? key : prefix + "." + key,
                      std::string("missing (expected ") + type_name + ")");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(prefix.empty() ? key : prefix + "." + key,
                      std::string("expected ") + type_name);
  }
}

template <typename T>
inline T optional(const json& obj, const std::string& prefix,
                  const std::string& key, const char* type_name, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(prefix.empty() ? key : prefix + "." + key,
                      std::string("expected ") + type_name);
  }
}

}  // namespace detail

struct ExperimentConfig {
  // dataset
  std::string signals_path;
  bool signals_header = false;
  GraphSource graph_source = EdgeListSource{};
  // protocol
  NoiseSpec noise;
  int observed_count = 0;
  int train_prefix = 0;
  int band_size = 0;
  int repetitions = 1;
  std::uint64_t base_seed = 1;
  std::string name = "experiment";
  std::vector<MethodSpec> methods;
};

namespace detail {

inline NoiseSpec parse_noise(const json& j) {
  if (!j.is_object()) throw ConfigError("noise", "expected object");
  reject_unknown_keys(j, "noise", {"family", "location", "scale", "alpha", "nu"});
  NoiseSpec spec;
  spec.family = noise_family_from_string(
      require<std::string>(j, "noise", "family", "string"));
  spec.location = optional<double>(j, "noise", "location", "number", 0.0);
  spec.scale = require<double>(j, "noise", "scale", "number");
  spec.alpha = optional<double>(j, "noise", "alpha", "number", 2.0);
  spec.nu = optional<double>(j, "noise", "nu", "number", 1.0);
  try {
    spec.validate();
  } catch (const ParameterError& e) {
    throw ConfigError("noise", e.what());
  }
  return spec;
}

inline MethodSpec parse_method(const json& j, const std::string& prefix) {
  if (!j.is_object()) throw ConfigError(prefix, "expected object");
  reject_unknown_keys(j, prefix,
                      {"method", "label", "mu", "p", "band_size", "delta_norm",
                       "forgetting", "layers", "eta", "pretrain_epochs",
                       "activation", "delta_grad", "leaky_slope",
                       "stop_gradient"});
  MethodSpec m;
  m.method = require<std::string>(j, prefix, "method", "string");
  m.label = optional<std::string>(j, prefix, "label", "string", "");
  m.mu = optional<double>(j, prefix, "mu", "number", m.mu);
  m.p = optional<double>(j, prefix, "p", "number", m.p);
  m.band_size = optional<int>(j, prefix, "band_size", "integer", m.band_size);
  m.delta_norm = optional<double>(j, prefix, "delta_norm", "number", m.delta_norm);
  m.forgetting = optional<double>(j, prefix, "forgetting", "number", m.forgetting);
  m.layers = optional<int>(j, prefix, "layers", "integer", m.layers);
  m.eta = optional<double>(j, prefix, "eta", "number", m.eta);
  m.pretrain_epochs =
      optional<int>(j, prefix, "pretrain_epochs", "integer", m.pretrain_epochs);
  m.activation =
      optional<std::string>(j, prefix, "activation", "string", m.activation);
  m.delta_grad = optional<double>(j, prefix, "delta_grad", "number", m.delta_grad);
  m.leaky_slope =
      optional<double>(j, prefix, "leaky_slope", "number", m.leaky_slope);
  m.stop_gradient =
      optional<bool>(j, prefix, "stop_gradient", "boolean", m.stop_gradient);
  try {
    m.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(prefix, e.what());
  }
  return m;
}

inline GraphSource parse_graph_source(const json& j) {
  if (!j.is_object()) throw ConfigError("dataset.graph", "expected object");
  if (j.contains("edges")) {
    reject_unknown_keys(j, "dataset.graph", {"edges"});
    return EdgeListSource{require<std::string>(j, "dataset.graph", "edges", "string")};
  }
  reject_unknown_keys(j, "dataset.graph", {"coords", "k", "bandwidth"});
  KnnSource src;
  src.coords_path = require<std::string>(j, "dataset.graph", "coords", "string");
  src.k = optional<int>(j, "dataset.graph", "k", "integer", 7);
  src.bandwidth = optional<double>(j, "dataset.graph", "bandwidth", "number", 0.0);
  return src;
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  using detail::optional;
  using detail::require;
  if (!j.is_object()) throw ConfigError("", "top level must be an object");
  detail::reject_unknown_keys(
      j, "",
      {"name", "dataset", "noise", "observed_count", "train_prefix",
       "band_size", "repetitions", "base_seed", "methods"});

  ExperimentConfig cfg;
  cfg.name = optional<std::string>(j, "", "name", "string", "experiment");

  if (!j.contains("dataset") || !j.at("dataset").is_object())
    throw ConfigError("dataset", "expected object");
  const auto& ds = j.at("dataset");
  detail::reject_unknown_keys(ds, "dataset", {"signals", "header", "graph"});
  cfg.signals_path = require<std::string>(ds, "dataset", "signals", "string");
  cfg.signals_header = optional<bool>(ds, "dataset", "header", "boolean", false);
  if (!ds.contains("graph")) throw ConfigError("dataset.graph", "missing");
  cfg.graph_source = detail::parse_graph_source(ds.at("graph"));

  if (!j.contains("noise")) throw ConfigError("noise", "missing");
  cfg.noise = detail::parse_noise(j.at("noise"));

  cfg.observed_count = require<int>(j, "", "observed_count", "integer");
  cfg.train_prefix = require<int>(j, "", "train_prefix", "integer");
  cfg.band_size = require<int>(j, "", "band_size", "integer");
  cfg.repetitions = optional<int>(j, "", "repetitions", "integer", 1);
  cfg.base_seed = optional<std::uint64_t>(j, "", "base_seed", "integer", 1);

  if (!j.contains("methods") || !j.at("methods").is_array() ||
      j.at("methods").empty())
    throw ConfigError("methods", "expected nonempty array");
  int idx = 0;
  for (const auto& mj : j.at("methods"))
    cfg.methods.push_back(
        detail::parse_method(mj, "methods." + std::to_string(idx++)));
  return cfg;
}

inline nlohmann::json load_config_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path, 0, e.what());
  }
  return j;
}

/// Apply `path.to.key=value` to the JSON tree. The path must already exist
/// (except for array elements addressed by index) so typos are caught; the
/// parsed value keeps the existing value's type.
inline void apply_override(nlohmann::json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError(assignment, "override must look like key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  nlohmann::json* node = &root;
  std::string consumed;
  size_t start = 0;
  while (true) {
    const size_t dot = path.find('.', start);
    const std::string part = path.substr(start, dot - start);
    consumed = consumed.empty() ? part : consumed + "." + part;
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(part);
      } catch (...) {
        throw ConfigError(consumed, "expected an array index");
      }
      if (idx >= node->size()) throw ConfigError(consumed, "index out of range");
      node = &(*node)[idx];
    } else if (node->is_object()) {
      if (!node->contains(part)) throw ConfigError(consumed, "no such key");
      node = &node->at(part);
    } else {
      throw ConfigError(consumed, "path descends into a scalar");
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }

  detail::json parsed;
  if (node->is_string()) {
    parsed = value;
  } else if (node->is_boolean()) {
    if (value == "true") parsed = true;
    else if (value == "false") parsed = false;
    else throw ConfigError(path, "expected true or false");
  } else if (node->is_number()) {
    double d;
    if (!detail::parse_double(value, d))
      throw ConfigError(path, "expected a number");
    if (node->is_number_integer() && d == static_cast<long long>(d))
      parsed = static_cast<long long>(d);
    else
      parsed = d;
  } else {
    throw ConfigError(path, "only scalar values can be overridden");
  }
  *node = parsed;
}

/// Resolve paths and load the dataset, producing a runnable spec.
inline ExperimentSpec build_experiment(const ExperimentConfig& cfg, int jobs) {
  ExperimentSpec spec{
      .dataset = load_dataset(cfg.signals_path, cfg.signals_header,
                              cfg.graph_source, cfg.name),
      .noise = cfg.noise,
      .observed_count = cfg.observed_count,
      .train_prefix = cfg.train_prefix,
      .band_size = cfg.band_size,
      .methods = cfg.methods,
      .repetitions = cfg.repetitions,
      .base_seed = cfg.base_seed,
      .name = cfg.name,
      .jobs = jobs,
  };
  try {
    spec.validate();
  } catch (const ParameterError& e) {
    throw ConfigError("", e.what());
  }
  return spec;
}

}  // namespace lmpgnn
