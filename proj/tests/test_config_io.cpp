#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "lmpgnn/config.hpp"
#include "lmpgnn/dataset_io.hpp"
#include "lmpgnn/experiment.hpp"
#include "lmpgnn/plot.hpp"

using namespace lmpgnn;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream out(path);
  out << content;
  return path;
}

nlohmann::json minimal_config() {
  return nlohmann::json{
      {"name", "t"},
      {"dataset",
       {{"signals", "signals.csv"}, {"graph", {{"edges", "graph.edges"}}}}},
      {"noise", {{"family", "sas"}, {"scale", 0.1}, {"alpha", 1.2}}},
      {"observed_count", 3},
      {"train_prefix", 2},
      {"band_size", 2},
      {"repetitions", 2},
      {"base_seed", 7},
      {"methods",
       nlohmann::json::array(
           {{{"method", "glms"}, {"mu", 0.5}},
            {{"method", "lmp-gnn"}, {"p", 1.2}, {"layers", 2}}})}};
}

}  // namespace

TEST(SignalsCsv, ParsesAndReportsRaggedRows) {
  const auto path = write_temp("signals_ok.csv", "1,2,3\n4,5,6\n");
  const Mat m = read_signals_csv(path);
  EXPECT_EQ(m.rows(), 2);
  EXPECT_EQ(m.cols(), 3);
  EXPECT_EQ(m(1, 2), 6.0);

  const auto with_header = write_temp("signals_h.csv", "a,b,c\n1,2,3\n");
  EXPECT_EQ(read_signals_csv(with_header, true).rows(), 1);

  const auto ragged = write_temp("signals_bad.csv", "1,2,3\n4,5\n");
  try {
    read_signals_csv(ragged);
    FAIL() << "expected parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
  }

  const auto garbage = write_temp("signals_nan.csv", "1,x,3\n");
  EXPECT_THROW(read_signals_csv(garbage), ParseError);
  EXPECT_THROW(read_signals_csv("/no/such/file.csv"), ParseError);
}

TEST(CoordsCsv, ParsesWithOptionalHeaderAndValidatesIds) {
  const auto path =
      write_temp("coords.csv", "node_id,lat,lon\n1,40.0,-105.0\n0,39.5,-104.9\n");
  const auto coords = read_coords_csv(path);
  ASSERT_EQ(coords.size(), 2u);
  EXPECT_EQ(coords[0].lat, 39.5);
  EXPECT_EQ(coords[1].lon, -105.0);

  const auto dup = write_temp("coords_dup.csv", "0,1,2\n0,3,4\n");
  EXPECT_THROW(read_coords_csv(dup), ParseError);
}

TEST(EdgeList, ParseErrors) {
  const auto selfloop = write_temp("g_loop.edges", "0,0,1.0\n");
  EXPECT_THROW(read_edge_list(selfloop), ParseError);
  const auto neg = write_temp("g_neg.edges", "0,1,-2.0\n");
  EXPECT_THROW(read_edge_list(neg), ParseError);
  const auto short_line = write_temp("g_short.edges", "0,1\n");
  EXPECT_THROW(read_edge_list(short_line), ParseError);
  const auto ok = write_temp("g_ok.edges", "0,1,1.5\n1,2,0.5\n");
  const Graph g = read_edge_list(ok);
  EXPECT_EQ(g.n_nodes(), 3);
  EXPECT_EQ(g.adjacency()(2, 1), 0.5);
  // Declared N below max index.
  EXPECT_THROW(read_edge_list(ok, 2), ParseError);
}

TEST(LoadDataset, ValidatesDimensionAgreement) {
  const auto signals = write_temp("ds_signals.csv", "1,2,3\n4,5,6\n7,8,9\n");
  const auto edges = write_temp("ds_graph.edges", "0,1,1.0\n1,2,1.0\n");
  const Dataset ds =
      load_dataset(signals, false, EdgeListSource{edges}, "demo");
  EXPECT_EQ(ds.graph.n_nodes(), 3);
  EXPECT_EQ(ds.signals.rows(), 3);

  // Fewer signal columns than the edge list's node span.
  const auto narrow = write_temp("ds_narrow.csv", "1,2\n3,4\n");
  EXPECT_THROW(load_dataset(narrow, false, EdgeListSource{edges}, "demo"),
               ParseError);
}

TEST(LoadDataset, KnnSourceBuildsGraphFromCoords) {
  const auto signals = write_temp("knn_signals.csv", "1,2,3\n4,5,6\n");
  const auto coords =
      write_temp("knn_coords.csv", "0,0.0,0.0\n1,0.0,1.0\n2,0.0,2.5\n");
  const Dataset ds =
      load_dataset(signals, false, KnnSource{coords, 1, 0.0}, "knn");
  EXPECT_EQ(ds.graph.n_nodes(), 3);
  EXPECT_GE(ds.graph.edge_count(), 2);
}

TEST(Config, ParsesMinimalAndRejectsUnknownKeys) {
  const ExperimentConfig cfg = parse_experiment_config(minimal_config());
  EXPECT_EQ(cfg.name, "t");
  EXPECT_EQ(cfg.noise.family, NoiseFamily::sas);
  EXPECT_EQ(cfg.noise.alpha, 1.2);
  EXPECT_EQ(cfg.methods.size(), 2u);
  EXPECT_EQ(cfg.methods[1].layers, 2);

  auto bad = minimal_config();
  bad["typo_key"] = 1;
  try {
    parse_experiment_config(bad);
    FAIL() << "expected config error";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "typo_key");
  }

  bad = minimal_config();
  bad["noise"]["gamma"] = 0.1;  // not a key; must be named in the error
  try {
    parse_experiment_config(bad);
    FAIL() << "expected config error";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "noise.gamma");
  }

  bad = minimal_config();
  bad["methods"][0]["stepsize"] = 0.1;
  try {
    parse_experiment_config(bad);
    FAIL() << "expected config error";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "methods.0.stepsize");
  }
}

TEST(Config, TypeErrorsNameKeyAndExpectedType) {
  auto bad = minimal_config();
  bad["observed_count"] = "lots";
  try {
    parse_experiment_config(bad);
    FAIL() << "expected config error";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "observed_count");
    EXPECT_NE(std::string(e.what()).find("integer"), std::string::npos);
  }
  bad = minimal_config();
  bad["noise"].erase("scale");
  try {
    parse_experiment_config(bad);
    FAIL() << "expected config error";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "noise.scale");
  }
}

TEST(Config, OverridesChangeExactlyTheNamedField) {
  auto j = minimal_config();
  apply_override(j, "noise.alpha=1.4");
  EXPECT_EQ(j["noise"]["alpha"], 1.4);
  EXPECT_EQ(j["noise"]["scale"], 0.1);
  apply_override(j, "repetitions=5");
  EXPECT_EQ(j["repetitions"], 5);
  apply_override(j, "methods.1.p=1.5");
  EXPECT_EQ(j["methods"][1]["p"], 1.5);
  apply_override(j, "name=renamed");
  EXPECT_EQ(j["name"], "renamed");

  EXPECT_THROW(apply_override(j, "noise.alpha"), ConfigError);
  try {
    apply_override(j, "noise.gamma=2");
    FAIL() << "expected config error";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "noise.gamma");
  }
  EXPECT_THROW(apply_override(j, "methods.7.mu=1"), ConfigError);
  EXPECT_THROW(apply_override(j, "observed_count=many"), ConfigError);
}

TEST(Plot, RendersDeterministicSvgWithLogAnnotation) {
  std::vector<PlotSeries> series{{"glms", {1.0, 0.5, 0.25, 0.125}},
                                 {"gsign", {2.0, 1.0, 0.5, 0.25}}};
  const std::string a = render_line_chart("mse", "t", "MSE", series, true);
  const std::string b = render_line_chart("mse", "t", "MSE", series, true);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("log scale"), std::string::npos);
  EXPECT_NE(a.find("polyline"), std::string::npos);
  EXPECT_NE(a.find("glms"), std::string::npos);
  const std::string lin = render_line_chart("mse", "t", "MSE", series, false);
  EXPECT_EQ(lin.find("log scale"), std::string::npos);
  EXPECT_THROW(render_line_chart("x", "y", "z", {}, false), ParameterError);
}
