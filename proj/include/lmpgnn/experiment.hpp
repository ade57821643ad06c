#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <numeric>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "lmpgnn/adaptive_filters.hpp"
#include "lmpgnn/dataset_io.hpp"
#include "lmpgnn/errors.hpp"
#include "lmpgnn/graph.hpp"
#include "lmpgnn/lmp_gnn.hpp"
#include "lmpgnn/noise.hpp"
#include "lmpgnn/rng.hpp"
#include "lmpgnn/spectral.hpp"

namespace lmpgnn {

// Observation model y[t] = D_S(x_g[t] + w[t]) and the repeated-run protocol:
// per repetition, one noise draw shared by every method, MSE over all nodes
// on the test segment, aggregated over time and repetitions.

struct Dataset {
  Mat signals;  // T x N ground truth
  Graph graph;
  std::string name;
};

inline Dataset make_dataset(Mat signals, Graph graph, std::string name) {
  if (signals.rows() < 2) throw ParameterError("need at least T = 2 timesteps");
  if (signals.cols() != graph.n_nodes())
    throw DimensionError("signals have " + std::to_string(signals.cols()) +
                         " columns but the graph has " +
                         std::to_string(graph.n_nodes()) + " nodes");
  if (!signals.allFinite())
    throw ParameterError("signals contain non-finite entries");
  return Dataset{std::move(signals), std::move(graph), std::move(name)};
}

struct EdgeListSource {
  std::string path;
};
struct KnnSource {
  std::string coords_path;
  int k = 7;
  double bandwidth = 0.0;  // <= 0 selects the mean k-NN distance
};
using GraphSource = std::variant<EdgeListSource, KnnSource>;

inline Dataset load_dataset(const std::string& signals_path, bool skip_header,
                            const GraphSource& source, std::string name) {
  Mat signals = read_signals_csv(signals_path, skip_header);
  Graph graph = std::visit(
      [&](const auto& src) -> Graph {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, EdgeListSource>) {
          return read_edge_list(src.path, static_cast<int>(signals.cols()));
        } else {
          return build_knn_graph(read_coords_csv(src.coords_path), src.k,
                                 src.bandwidth);
        }
      },
      source);
  return make_dataset(std::move(signals), std::move(graph), std::move(name));
}

/// Uniform random subset of observed_count nodes, without replacement,
/// deterministic per seed. Fixed for the whole experiment.
inline SamplingMask choose_sampling_set(int n_nodes, int observed_count,
                                        std::uint64_t seed) {
  if (observed_count < 0 || observed_count > n_nodes)
    throw ParameterError("observed_count must be in [0, N]");
  std::vector<int> idx(n_nodes);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (int i = 0; i < observed_count; ++i) {
    const int j = i + static_cast<int>(rng.next_u64() % (n_nodes - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(observed_count);
  return SamplingMask(std::move(idx), n_nodes);
}

struct ObservationStream {
  std::vector<Vec> y;  // y[t] = D_S(x_g[t] + w[t])
};

/// Noise is reseeded per timestep from the stream seed, so any (repetition,
/// timestep) draw can be replayed in isolation.
inline ObservationStream make_observations(const Dataset& dataset,
                                           const NoiseSpec& noise,
                                           const SamplingMask& mask,
                                           std::uint64_t seed) {
  noise.validate();
  const int t_total = static_cast<int>(dataset.signals.rows());
  const int n = static_cast<int>(dataset.signals.cols());
  if (mask.n() != n) throw DimensionError("mask size != N");
  ObservationStream obs;
  obs.y.reserve(t_total);
  for (int t = 0; t < t_total; ++t) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(t)}));
    Vec noisy(n);
    for (int i = 0; i < n; ++i)
      noisy[i] = dataset.signals(t, i) + sample_one(noise, rng);
    obs.y.push_back(mask.apply(noisy));
  }
  return obs;
}

/// Spatial MSE over all N nodes, observed and unobserved alike.
inline double mse_at(const Vec& x_true, const Vec& x_pred) {
  if (x_true.size() != x_pred.size())
    throw DimensionError("signal lengths disagree");
  return (x_true - x_pred).squaredNorm() / static_cast<double>(x_true.size());
}

/// One entry of the method roster. Baselines: glms, gnlms, glmp, gnlmp,
/// gsign. Networks: lmp-gnn (free p), sign-gnn (p = 1), lms-gnn (p = 2).
struct MethodSpec {
  std::string method = "glms";
  std::string label;  // defaults to method name
  double mu = 0.5;
  double p = 2.0;
  int band_size = -1;  // -1: use the experiment-level band size
  double delta_norm = 1e-6;
  double forgetting = 0.9;
  // network-only knobs
  int layers = 2;
  double eta = 1e-3;
  int pretrain_epochs = 50;
  std::string activation = "identity";
  double delta_grad = 1e-6;
  double leaky_slope = 0.01;
  bool stop_gradient = false;

  bool is_network() const {
    return method == "lmp-gnn" || method == "sign-gnn" || method == "lms-gnn";
  }

  double effective_p() const {
    if (method == "sign-gnn" || method == "gsign") return 1.0;
    if (method == "lms-gnn" || method == "lms" || method == "glms") return 2.0;
    if (method == "gnlms") return 2.0;
    return p;
  }

  std::string display_label() const { return label.empty() ? method : label; }

  void validate() const {
    static const char* known[] = {"glms",    "gnlms",   "glmp",   "gnlmp",
                                  "gsign",   "lmp-gnn", "sign-gnn", "lms-gnn"};
    bool ok = false;
    for (const char* k : known) ok = ok || method == k;
    if (!ok) throw ParameterError("unknown method '" + method + "'");
    if (!(mu > 0.0)) throw ParameterError("mu must be positive");
    if (!(p >= 1.0 && p <= 2.0)) throw ParameterError("p must be in [1, 2]");
    if (is_network()) {
      if (layers < 1) throw ParameterError("layers must be >= 1");
      if (!(eta >= 0.0)) throw ParameterError("eta must be >= 0");
      if (pretrain_epochs < 0) throw ParameterError("pretrain_epochs must be >= 0");
      activation_from_string(activation);
    }
  }
};

struct ExperimentSpec {
  Dataset dataset;
  NoiseSpec noise;
  int observed_count = 0;
  int train_prefix = 0;
  int band_size = 0;
  std::vector<MethodSpec> methods;
  int repetitions = 1;
  std::uint64_t base_seed = 1;
  std::string name = "experiment";
  int jobs = 1;

  void validate() const {
    const int n = dataset.graph.n_nodes();
    const int t_total = static_cast<int>(dataset.signals.rows());
    noise.validate();
    if (observed_count < 1 || observed_count > n)
      throw ParameterError("observed_count must be in [1, N]");
    if (train_prefix < 1 || train_prefix >= t_total)
      throw ParameterError("train_prefix must be in [1, T)");
    if (band_size < 1 || band_size > n)
      throw ParameterError("band_size must be in [1, N]");
    if (repetitions < 1) throw ParameterError("repetitions must be >= 1");
    if (methods.empty()) throw ParameterError("no methods configured");
    std::set<std::string> labels;
    for (const auto& m : methods) {
      m.validate();
      if (m.band_size != -1 && (m.band_size < 1 || m.band_size > n))
        throw ParameterError("method band_size must be in [1, N]");
      if (!labels.insert(m.display_label()).second)
        throw ParameterError("duplicate method label '" + m.display_label() +
                             "'; set distinct 'label' values");
    }
  }
};

struct MethodResult {
  std::string label;
  Mat mse;  // repetitions x test steps; diverged repetitions hold NaN
  std::vector<long> diverged_at;  // per repetition, -1 when it completed
  int diverged_count = 0;
  double mean_mse = std::numeric_limits<double>::quiet_NaN();
  double std_over_reps = std::numeric_limits<double>::quiet_NaN();
  Mat sample_prediction;  // repetition-0 predictions, test steps x N
};

struct ResultTable {
  std::string experiment;
  int train_prefix = 0;
  int t_total = 0;
  int repetitions = 0;
  std::vector<MethodResult> methods;
  Mat truth_test;  // test steps x N ground truth
};

namespace detail {

struct RunOutput {
  std::vector<Vec> predictions;  // test-step predictions
  long diverged_at = -1;
};

inline RunOutput run_single_method(const MethodSpec& m,
                                   const ObservationStream& obs,
                                   const SamplingMask& mask,
                                   const std::shared_ptr<const GftBasis>& basis,
                                   const SpectralFilter& band,
                                   const Vec& initial_estimate,
                                   int train_prefix) {
  RunOutput out;
  const int t_total = static_cast<int>(obs.y.size());
  try {
    if (m.is_network()) {
      LmpGnnNetwork net =
          make_network(basis, m.layers, m.effective_p(), m.mu, m.eta, band,
                       activation_from_string(m.activation), m.delta_grad,
                       m.leaky_slope);
      net.stop_gradient = m.stop_gradient;
      GnnRunResult r = run_online_gnn(std::move(net), obs.y, mask,
                                      initial_estimate,
                                      PretrainSpec{train_prefix, m.pretrain_epochs});
      out.predictions = std::move(r.predictions);
    } else {
      AdaptiveFilterConfig cfg;
      cfg.method = filter_method_from_string(m.method);
      cfg.step_size = m.mu;
      cfg.p = m.effective_p();
      cfg.band_filter = band;
      cfg.norm_floor = m.delta_norm;
      cfg.forgetting = m.forgetting;
      std::vector<Vec> all =
          run_online(cfg, initial_estimate, obs.y, mask, *basis);
      out.predictions.assign(all.begin() + train_prefix, all.end());
    }
  } catch (const DivergenceError& e) {
    out.predictions.clear();
    out.diverged_at = e.timestep();
  }
  if (!out.predictions.empty() &&
      static_cast<int>(out.predictions.size()) != t_total - train_prefix)
    throw ParameterError("internal: prediction count mismatch");
  return out;
}

}  // namespace detail

/// Execute the full protocol. Each repetition draws one observation stream
/// shared bit-for-bit by every method; repetitions are independent and may
/// run on spec.jobs threads with results identical to a serial run.
inline ResultTable run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const int n = spec.dataset.graph.n_nodes();
  const int t_total = static_cast<int>(spec.dataset.signals.rows());
  const int t_test = t_total - spec.train_prefix;
  const int n_methods = static_cast<int>(spec.methods.size());

  const auto basis =
      std::make_shared<const GftBasis>(gft_basis(laplacian(spec.dataset.graph)));
  const Mat training_rows = spec.dataset.signals.topRows(spec.train_prefix);

  // One designed filter per distinct band size.
  std::map<int, SpectralFilter> filters;
  auto filter_for = [&](int band_size) -> const SpectralFilter& {
    auto it = filters.find(band_size);
    if (it == filters.end())
      it = filters.emplace(band_size,
                           greedy_bandlimit(training_rows, *basis, band_size))
               .first;
    return it->second;
  };
  for (const auto& m : spec.methods)
    filter_for(m.band_size == -1 ? spec.band_size : m.band_size);

  const SamplingMask mask = choose_sampling_set(
      n, spec.observed_count, derive_seed(spec.base_seed, {kSamplingStream}));

  ResultTable table;
  table.experiment = spec.name;
  table.train_prefix = spec.train_prefix;
  table.t_total = t_total;
  table.repetitions = spec.repetitions;
  table.truth_test = spec.dataset.signals.bottomRows(t_test);
  table.methods.resize(n_methods);
  for (int m = 0; m < n_methods; ++m) {
    table.methods[m].label = spec.methods[m].display_label();
    table.methods[m].mse = Mat::Constant(
        spec.repetitions, t_test, std::numeric_limits<double>::quiet_NaN());
    table.methods[m].diverged_at.assign(spec.repetitions, -1);
  }

  std::atomic<int> next_rep{0};
  auto worker = [&]() {
    for (;;) {
      const int r = next_rep.fetch_add(1);
      if (r >= spec.repetitions) return;
      const ObservationStream obs =
          make_observations(spec.dataset, spec.noise, mask,
                            derive_seed(spec.base_seed,
                                        {kNoiseStream, static_cast<std::uint64_t>(r)}));
      for (int m = 0; m < n_methods; ++m) {
        const MethodSpec& ms = spec.methods[m];
        const SpectralFilter& band =
            filter_for(ms.band_size == -1 ? spec.band_size : ms.band_size);
        const Vec x0 = spec.train_prefix >= 1
                           ? apply_spectral_filter(*basis, band, obs.y[0])
                           : Vec(Vec::Zero(n));
        const detail::RunOutput run = detail::run_single_method(
            ms, obs, mask, basis, band, x0, spec.train_prefix);
        table.methods[m].diverged_at[r] = run.diverged_at;
        if (run.diverged_at < 0)
          for (int t = 0; t < t_test; ++t)
            table.methods[m].mse(r, t) =
                mse_at(spec.dataset.signals.row(spec.train_prefix + t),
                       run.predictions[t]);
        if (r == 0 && run.diverged_at < 0) {
          Mat pred(t_test, n);
          for (int t = 0; t < t_test; ++t) pred.row(t) = run.predictions[t];
          table.methods[m].sample_prediction = std::move(pred);
        }
      }
    }
  };

  const int jobs = std::max(1, std::min(spec.jobs, spec.repetitions));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (auto& mr : table.methods) {
    double sum = 0.0;
    long count = 0;
    std::vector<double> rep_means;
    for (int r = 0; r < spec.repetitions; ++r) {
      if (mr.diverged_at[r] >= 0) {
        ++mr.diverged_count;
        continue;
      }
      double rs = mr.mse.row(r).sum();
      sum += rs;
      count += t_test;
      rep_means.push_back(rs / t_test);
    }
    if (count > 0) mr.mean_mse = sum / static_cast<double>(count);
    if (rep_means.size() > 1) {
      double mean = std::accumulate(rep_means.begin(), rep_means.end(), 0.0) /
                    rep_means.size();
      double ss = 0.0;
      for (double v : rep_means) ss += (v - mean) * (v - mean);
      mr.std_over_reps = std::sqrt(ss / (rep_means.size() - 1));
    } else if (rep_means.size() == 1) {
      mr.std_over_reps = 0.0;
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Result persistence.

namespace detail {

inline std::string sanitize_label(const std::string& label) {
  std::string out;
  for (char c : label)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
            c == '_' || c == '.')
               ? c
               : '_';
  return out.empty() ? std::string("method") : out;
}

}  // namespace detail

/// Layout: <dir>/<experiment>/summary.csv, truth.csv and one subdirectory per
/// method holding mse_t.csv (rows: repetition, columns: timestep) and the
/// repetition-0 predictions.
inline std::filesystem::path write_results(const ResultTable& table,
                                           const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  const fs::path root = out_dir / table.experiment;
  fs::create_directories(root);
  write_matrix_csv(table.truth_test, (root / "truth.csv").string());
  std::ofstream summary(root / "summary.csv");
  if (!summary) throw ParseError((root / "summary.csv").string(), 0, "cannot open");
  summary << "method,mean_mse,std_mse,diverged,repetitions,test_steps\n";
  char buf[64];
  for (const auto& mr : table.methods) {
    const fs::path mdir = root / detail::sanitize_label(mr.label);
    fs::create_directories(mdir);
    write_matrix_csv(mr.mse, (mdir / "mse_t.csv").string());
    if (mr.sample_prediction.size() > 0)
      write_matrix_csv(mr.sample_prediction, (mdir / "pred_r0.csv").string());
    std::snprintf(buf, sizeof buf, "%.17g", mr.mean_mse);
    summary << mr.label << "," << buf;
    std::snprintf(buf, sizeof buf, "%.17g", mr.std_over_reps);
    summary << "," << buf << "," << mr.diverged_count << ","
            << mr.mse.rows() << "," << mr.mse.cols() << "\n";
  }
  return root;
}

struct StoredMethod {
  std::string label;
  Mat mse;
  double mean_mse = std::numeric_limits<double>::quiet_NaN();
  double std_mse = std::numeric_limits<double>::quiet_NaN();
  int diverged = 0;
};

/// Read back what write_results produced (summary order preserved).
inline std::vector<StoredMethod> read_results(
    const std::filesystem::path& experiment_dir) {
  namespace fs = std::filesystem;
  const fs::path summary_path = experiment_dir / "summary.csv";
  std::ifstream in(summary_path);
  if (!in) throw ParseError(summary_path.string(), 0, "cannot open");
  std::vector<StoredMethod> methods;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 || detail::blank(line)) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 6)
      throw ParseError(summary_path.string(), lineno, "expected 6 fields");
    StoredMethod sm;
    sm.label = fields[0];
    double diverged = 0;
    if (!detail::parse_double(fields[1], sm.mean_mse) ||
        !detail::parse_double(fields[2], sm.std_mse) ||
        !detail::parse_double(fields[3], diverged))
      throw ParseError(summary_path.string(), lineno, "non-numeric field");
    sm.diverged = static_cast<int>(diverged);
    sm.mse = read_signals_csv(
        (experiment_dir / detail::sanitize_label(sm.label) / "mse_t.csv").string());
    methods.push_back(std::move(sm));
  }
  if (methods.empty())
    throw ParseError(summary_path.string(), lineno, "no methods in summary");
  return methods;
}

}  // namespace lmpgnn
