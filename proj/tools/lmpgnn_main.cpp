// Command-line front end: graph construction, bandlimited filter design,
// experiment execution, reporting and SVG plots.
//
// Exit codes: 0 success, 2 input error, 3 configuration error,
// 4 internal numerical error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lmpgnn/config.hpp"
#include "lmpgnn/dataset_io.hpp"
#include "lmpgnn/experiment.hpp"
#include "lmpgnn/plot.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;
constexpr int kExitNumeric = 4;

void print_summary_table(const std::vector<lmpgnn::StoredMethod>& methods) {
  std::printf("%-24s %12s %12s %10s\n", "method", "mean MSE", "std(rep)",
              "diverged");
  for (const auto& m : methods)
    std::printf("%-24s %12.6g %12.6g %10d\n", m.label.c_str(), m.mean_mse,
                m.std_mse, m.diverged);
}

int cmd_build_graph(const std::string& coords_path, int k, double bandwidth,
                    const std::string& out_path) {
  const auto coords = lmpgnn::read_coords_csv(coords_path);
  const lmpgnn::Graph g = lmpgnn::build_knn_graph(coords, k, bandwidth);
  lmpgnn::write_edge_list(g, out_path);
  std::printf("nodes %d\nedges %d\n", g.n_nodes(), g.edge_count());
  return kExitOk;
}

int cmd_design_filter(const std::string& signals_path, bool header,
                      const std::string& edges_path,
                      const std::string& coords_path, int k, double bandwidth,
                      int band_size, int train_prefix,
                      const std::string& out_path) {
  lmpgnn::GraphSource source;
  if (!edges_path.empty())
    source = lmpgnn::EdgeListSource{edges_path};
  else if (!coords_path.empty())
    source = lmpgnn::KnnSource{coords_path, k, bandwidth};
  else
    throw lmpgnn::ConfigError("graph", "give --edges or --coords");
  const lmpgnn::Dataset ds =
      lmpgnn::load_dataset(signals_path, header, source, "design");
  const int t_design =
      train_prefix > 0
          ? std::min<int>(train_prefix, static_cast<int>(ds.signals.rows()))
          : static_cast<int>(ds.signals.rows());
  const auto basis = lmpgnn::gft_basis(lmpgnn::laplacian(ds.graph));
  const auto filt =
      lmpgnn::greedy_bandlimit(ds.signals.topRows(t_design), basis, band_size);
  std::ofstream out(out_path);
  if (!out) throw lmpgnn::ParseError(out_path, 0, "cannot open for writing");
  for (int f : filt.kept_frequencies()) out << f << "\n";
  std::printf("kept %d of %d frequencies\n", band_size, basis.n());
  return kExitOk;
}

int cmd_run(const std::string& config_path,
            const std::vector<std::string>& overrides,
            const std::string& out_dir, int jobs) {
  nlohmann::json j = lmpgnn::load_config_json(config_path);
  for (const auto& o : overrides) lmpgnn::apply_override(j, o);
  const lmpgnn::ExperimentConfig cfg = lmpgnn::parse_experiment_config(j);
  const lmpgnn::ExperimentSpec spec = lmpgnn::build_experiment(cfg, jobs);
  const lmpgnn::ResultTable table = lmpgnn::run_experiment(spec);
  const auto root = lmpgnn::write_results(table, out_dir);
  std::printf("experiment %s: %d repetitions, %d test steps, results in %s\n",
              table.experiment.c_str(), table.repetitions,
              table.t_total - table.train_prefix, root.string().c_str());
  print_summary_table(lmpgnn::read_results(root));
  return kExitOk;
}

int cmd_report(const std::string& results_dir) {
  const auto methods = lmpgnn::read_results(results_dir);
  // Re-derive the aggregate from the stored series; a disagreement means the
  // stored files were edited or truncated.
  for (const auto& m : methods) {
    if (m.diverged > 0 || m.mse.size() == 0) continue;
    double sum = 0.0;
    long count = 0;
    for (Eigen::Index r = 0; r < m.mse.rows(); ++r)
      for (Eigen::Index t = 0; t < m.mse.cols(); ++t)
        if (std::isfinite(m.mse(r, t))) {
          sum += m.mse(r, t);
          ++count;
        }
    if (count > 0 && std::abs(sum / count - m.mean_mse) >
                         1e-9 * std::max(1.0, std::abs(m.mean_mse)))
      std::fprintf(stderr,
                   "warning: %s summary mean %.12g != recomputed %.12g\n",
                   m.label.c_str(), m.mean_mse, sum / count);
  }
  print_summary_table(methods);
  return kExitOk;
}

int cmd_plot(const std::string& results_dir, const std::string& out_path,
             bool log_scale, int node, const std::string& method_label) {
  namespace fs = std::filesystem;
  const fs::path dir(results_dir);
  if (!fs::exists(dir / "summary.csv"))
    throw lmpgnn::ParseError((dir / "summary.csv").string(), 0,
                             "no results found");
  const auto methods = lmpgnn::read_results(dir);

  if (node >= 0) {
    const lmpgnn::Mat truth =
        lmpgnn::read_signals_csv((dir / "truth.csv").string());
    if (node >= truth.cols())
      throw lmpgnn::ParameterError("node index out of range");
    std::vector<lmpgnn::PlotSeries> series;
    series.push_back({"ground truth",
                      {truth.col(node).data(),
                       truth.col(node).data() + truth.rows()}});
    for (const auto& m : methods) {
      if (!method_label.empty() && m.label != method_label) continue;
      const fs::path pred =
          dir / lmpgnn::detail::sanitize_label(m.label) / "pred_r0.csv";
      if (!fs::exists(pred)) continue;
      const lmpgnn::Mat p = lmpgnn::read_signals_csv(pred.string());
      series.push_back({m.label,
                        {p.col(node).data(), p.col(node).data() + p.rows()}});
    }
    lmpgnn::write_svg(
        lmpgnn::render_line_chart("node " + std::to_string(node) +
                                      " prediction vs ground truth",
                                  "test timestep", "signal", series, false),
        out_path);
    std::printf("wrote %s\n", out_path.c_str());
    return kExitOk;
  }

  std::vector<lmpgnn::PlotSeries> series;
  for (const auto& m : methods) {
    lmpgnn::PlotSeries s;
    s.label = m.label;
    s.values.resize(m.mse.cols());
    for (Eigen::Index t = 0; t < m.mse.cols(); ++t) {
      double sum = 0.0;
      int cnt = 0;
      for (Eigen::Index r = 0; r < m.mse.rows(); ++r)
        if (std::isfinite(m.mse(r, t))) {
          sum += m.mse(r, t);
          ++cnt;
        }
      s.values[t] = cnt ? sum / cnt : std::numeric_limits<double>::quiet_NaN();
    }
    series.push_back(std::move(s));
  }
  lmpgnn::write_svg(lmpgnn::render_line_chart("MSE per test timestep",
                                              "test timestep", "MSE", series,
                                              log_scale),
                    out_path);
  std::printf("wrote %s\n", out_path.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online estimation of time-varying graph signals under "
               "impulsive noise: adaptive graph filters and the LMP-GNN "
               "family, with a seeded experiment harness"};
  app.require_subcommand(1);

  // build-graph
  std::string coords_path, out_path;
  int k = 7;
  double bandwidth = 0.0;
  auto* build = app.add_subcommand(
      "build-graph", "Build a k-NN Gaussian-kernel graph from station "
                     "coordinates (CSV: node_id,lat,lon) and write an "
                     "edge-list file (i,j,weight per line)");
  build->add_option("--coords", coords_path, "coordinates CSV")->required();
  build->add_option("--k", k, "neighbors per node (default 7)");
  build->add_option("--bandwidth", bandwidth,
                    "Gaussian kernel bandwidth in km; 0 = mean k-NN distance");
  build->add_option("--out", out_path, "output edge-list path")->required();

  // design-filter
  std::string df_signals, df_edges, df_coords, df_out;
  bool df_header = false;
  int df_k = 7, df_band = 0, df_train = 0;
  double df_bw = 0.0;
  auto* design = app.add_subcommand(
      "design-filter", "Design the greedy bandlimited filter from training "
                       "signals and write the kept frequency indices");
  design->add_option("--signals", df_signals, "signals CSV (T rows x N cols)")
      ->required();
  design->add_flag("--header", df_header, "skip one header line");
  design->add_option("--edges", df_edges, "graph edge-list path");
  design->add_option("--coords", df_coords, "coordinates CSV (k-NN graph)");
  design->add_option("--k", df_k, "k-NN neighbors (with --coords)");
  design->add_option("--bandwidth", df_bw, "kernel bandwidth (with --coords)");
  design->add_option("--band", df_band, "number of frequencies to keep")
      ->required();
  design->add_option("--train", df_train,
                     "design from the first T0 rows only (default: all)");
  design->add_option("--out", df_out, "output path")->required();

  // run
  std::string run_config, run_out = "results";
  std::vector<std::string> run_overrides;
  int run_jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (run_jobs < 1) run_jobs = 1;
  auto* run = app.add_subcommand(
      "run",
      "Run an experiment from a JSON config. Top-level keys: name, dataset "
      "{signals, header, graph {edges | coords, k, bandwidth}}, noise "
      "{family, location, scale, alpha, nu}, observed_count, train_prefix, "
      "band_size, repetitions, base_seed, methods [{method, label, mu, p, "
      "band_size, delta_norm, forgetting, layers, eta, pretrain_epochs, "
      "activation, delta_grad, leaky_slope, stop_gradient}]");
  run->add_option("--config", run_config, "experiment config JSON")->required();
  run->add_option("--override", run_overrides,
                  "dotted-path override, e.g. noise.alpha=1.4 (repeatable)");
  run->add_option("--out", run_out, "results root directory")
      ->envname("LMPGNN_RESULTS_DIR");
  run->add_option("--jobs", run_jobs, "parallel repetitions (default: cores)");

  // report
  std::string rep_dir;
  auto* report = app.add_subcommand(
      "report", "Print the summary table of a results directory");
  report->add_option("--results", rep_dir, "experiment results directory")
      ->required();

  // plot
  std::string plot_dir, plot_out, plot_method;
  bool plot_log = false;
  int plot_node = -1;
  auto* plot = app.add_subcommand(
      "plot", "Render an SVG chart from a results directory: MSE-per-timestep "
              "lines by default, or one node's prediction vs ground truth "
              "with --node");
  plot->add_option("--results", plot_dir, "experiment results directory")
      ->required();
  plot->add_option("--out", plot_out, "output SVG path")->required();
  plot->add_flag("--log", plot_log, "log-scale vertical axis");
  plot->add_option("--node", plot_node, "plot this node's prediction");
  plot->add_option("--method", plot_method,
                   "restrict --node plot to one method label");

  try {
    app.parse(argc, argv);
    if (build->parsed())
      return cmd_build_graph(coords_path, k, bandwidth, out_path);
    if (design->parsed())
      return cmd_design_filter(df_signals, df_header, df_edges, df_coords,
                               df_k, df_bw, df_band, df_train, df_out);
    if (run->parsed()) return cmd_run(run_config, run_overrides, run_out, run_jobs);
    if (report->parsed()) return cmd_report(rep_dir);
    if (plot->parsed())
      return cmd_plot(plot_dir, plot_out, plot_log, plot_node, plot_method);
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  } catch (const lmpgnn::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const lmpgnn::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const lmpgnn::DimensionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const lmpgnn::DivergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  } catch (const lmpgnn::ParameterError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
}
