// End-to-end checks of the command-line tool: every subcommand is exercised
// through a real process, including the documented exit codes.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int exit_code;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::path(::testing::TempDir());
  const fs::path out = dir / ("cli_out_" + std::to_string(counter) + ".txt");
  const fs::path err = dir / ("cli_err_" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = std::string(LMPGNN_CLI_PATH) + " " + args + " >" +
                          out.string() + " 2>" + err.string();
  const int rc = std::system(cmd.c_str());
  return CliResult{WEXITSTATUS(rc), slurp(out), slurp(err)};
}

fs::path sandbox() {
  const fs::path dir = fs::path(::testing::TempDir()) / "cli_sandbox";
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

fs::path make_inputs() {
  const fs::path dir = sandbox();
  write_file(dir / "coords.csv",
             "0,40.0,-105.0\n1,40.1,-105.1\n2,40.2,-104.9\n3,39.9,-105.2\n"
             "4,40.05,-104.95\n5,39.95,-105.05\n");
  std::ostringstream signals;
  for (int t = 0; t < 24; ++t) {
    for (int i = 0; i < 6; ++i)
      signals << (i ? "," : "")
              << 5.0 + std::cos(0.2 * t + 0.5 * i) + 0.3 * i;
    signals << "\n";
  }
  write_file(dir / "signals.csv", signals.str());
  write_file(dir / "config.json", R"({
  "name": "cli-smoke",
  "dataset": {
    "signals": ")" + (dir / "signals.csv").string() + R"(",
    "graph": { "coords": ")" + (dir / "coords.csv").string() + R"(", "k": 2 }
  },
  "noise": { "family": "sas", "scale": 0.05, "alpha": 1.5 },
  "observed_count": 5,
  "train_prefix": 6,
  "band_size": 3,
  "repetitions": 3,
  "base_seed": 11,
  "methods": [
    { "method": "glms", "mu": 0.4 },
    { "method": "gsign", "mu": 0.6 },
    { "method": "lmp-gnn", "p": 1.2, "mu": 0.4, "layers": 2,
      "eta": 0.001, "pretrain_epochs": 5 }
  ]
})");
  return dir;
}

}  // namespace

TEST(Cli, BuildGraphIsDeterministicAndReportsCounts) {
  const fs::path dir = make_inputs();
  const std::string base = "build-graph --coords " +
                           (dir / "coords.csv").string() + " --k 2 --out " +
                           (dir / "g1.edges").string();
  const CliResult r1 = run_cli(base);
  ASSERT_EQ(r1.exit_code, 0) << r1.err;
  EXPECT_NE(r1.out.find("nodes 6"), std::string::npos);
  EXPECT_NE(r1.out.find("edges"), std::string::npos);
  const CliResult r2 =
      run_cli("build-graph --coords " + (dir / "coords.csv").string() +
              " --k 2 --out " + (dir / "g2.edges").string());
  ASSERT_EQ(r2.exit_code, 0);
  EXPECT_EQ(slurp(dir / "g1.edges"), slurp(dir / "g2.edges"));
  EXPECT_FALSE(slurp(dir / "g1.edges").empty());
}

TEST(Cli, MissingInputFileExitsTwoAndNamesThePath) {
  const CliResult r = run_cli(
      "build-graph --coords /no/such/coords.csv --k 2 --out /tmp/x.edges");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("/no/such/coords.csv"), std::string::npos);
}

TEST(Cli, DesignFilterWritesFrequencies) {
  const fs::path dir = make_inputs();
  const CliResult r = run_cli(
      "design-filter --signals " + (dir / "signals.csv").string() +
      " --coords " + (dir / "coords.csv").string() + " --k 2 --band 3" +
      " --train 6 --out " + (dir / "band.txt").string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  std::ifstream in(dir / "band.txt");
  int count = 0, f = 0;
  while (in >> f) {
    EXPECT_GE(f, 0);
    EXPECT_LT(f, 6);
    ++count;
  }
  EXPECT_EQ(count, 3);
}

TEST(Cli, RunReportPlotPipeline) {
  const fs::path dir = make_inputs();
  const fs::path results = dir / "results";
  const CliResult run =
      run_cli("run --config " + (dir / "config.json").string() +
              " --override repetitions=2 --out " + results.string() +
              " --jobs 2");
  ASSERT_EQ(run.exit_code, 0) << run.err;
  EXPECT_NE(run.out.find("glms"), std::string::npos);
  EXPECT_NE(run.out.find("lmp-gnn"), std::string::npos);
  EXPECT_TRUE(fs::exists(results / "cli-smoke" / "summary.csv"));
  EXPECT_TRUE(fs::exists(results / "cli-smoke" / "glms" / "mse_t.csv"));

  // The override must change exactly that field: 2 repetitions, not 3.
  const std::string mse = slurp(results / "cli-smoke" / "glms" / "mse_t.csv");
  EXPECT_EQ(std::count(mse.begin(), mse.end(), '\n'), 2);

  const CliResult report =
      run_cli("report --results " + (results / "cli-smoke").string());
  ASSERT_EQ(report.exit_code, 0) << report.err;
  EXPECT_NE(report.out.find("mean MSE"), std::string::npos);
  EXPECT_NE(report.out.find("gsign"), std::string::npos);

  const CliResult plot =
      run_cli("plot --results " + (results / "cli-smoke").string() +
              " --out " + (dir / "mse.svg").string() + " --log");
  ASSERT_EQ(plot.exit_code, 0) << plot.err;
  const std::string svg = slurp(dir / "mse.svg");
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("log scale"), std::string::npos);

  const CliResult node_plot =
      run_cli("plot --results " + (results / "cli-smoke").string() +
              " --out " + (dir / "node.svg").string() + " --node 1");
  ASSERT_EQ(node_plot.exit_code, 0) << node_plot.err;
  EXPECT_NE(slurp(dir / "node.svg").find("ground truth"), std::string::npos);

  const CliResult plot_again =
      run_cli("plot --results " + (results / "cli-smoke").string() +
              " --out " + (dir / "mse2.svg").string() + " --log");
  ASSERT_EQ(plot_again.exit_code, 0);
  EXPECT_EQ(slurp(dir / "mse.svg"), slurp(dir / "mse2.svg"));
}

TEST(Cli, ConfigErrorsExitThreeAndNameTheKey) {
  const fs::path dir = make_inputs();
  const CliResult bad_override =
      run_cli("run --config " + (dir / "config.json").string() +
              " --override noise.gamma=2 --out " + (dir / "r2").string());
  EXPECT_EQ(bad_override.exit_code, 3);
  EXPECT_NE(bad_override.err.find("noise.gamma"), std::string::npos);

  write_file(dir / "bad.json", R"({"name": "x", "unknown_top": 1})");
  const CliResult bad_key = run_cli("run --config " +
                                    (dir / "bad.json").string());
  EXPECT_EQ(bad_key.exit_code, 3);
  EXPECT_NE(bad_key.err.find("unknown_top"), std::string::npos);

  const CliResult bad_flag = run_cli("run --no-such-flag");
  EXPECT_EQ(bad_flag.exit_code, 3);
}

TEST(Cli, EmptyResultsDirFailsPlot) {
  const fs::path dir = sandbox() / "empty_results";
  fs::create_directories(dir);
  const CliResult r = run_cli("plot --results " + dir.string() + " --out " +
                              (dir / "x.svg").string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, HelpDocumentsSubcommands) {
  const CliResult top = run_cli("--help");
  EXPECT_EQ(top.exit_code, 0);
  for (const char* sub : {"build-graph", "design-filter", "run", "report", "plot"})
    EXPECT_NE(top.out.find(sub), std::string::npos) << sub;
  const CliResult run_help = run_cli("run --help");
  EXPECT_EQ(run_help.exit_code, 0);
  EXPECT_NE(run_help.out.find("--override"), std::string::npos);
  EXPECT_NE(run_help.out.find("band_size"), std::string::npos);
}
