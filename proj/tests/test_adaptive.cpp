#include "lmpgnn/adaptive_filters.hpp"

#include <gtest/gtest.h>

#include <memory>

#include "lmpgnn/spectral.hpp"
#include "test_support.hpp"

using namespace lmpgnn;

namespace {

struct Fixture {
  Graph graph;
  GftBasis basis;
  SamplingMask mask;

  explicit Fixture(int n, std::uint64_t seed, int observed)
      : graph(testsupport::random_connected_graph(n, seed)),
        basis(gft_basis(laplacian(graph))),
        mask(testsupport::random_mask(n, observed, seed + 1)) {}
};

AdaptiveFilterConfig config_for(FilterMethod m, int n, int band, double mu,
                                double p = 2.0) {
  AdaptiveFilterConfig cfg;
  cfg.method = m;
  cfg.step_size = mu;
  cfg.p = p;
  std::vector<int> kept(band);
  std::iota(kept.begin(), kept.end(), 0);
  cfg.band_filter = SpectralFilter::bandlimited(kept, n);
  return cfg;
}

}  // namespace

TEST(ErrorTerm, MaskedResidual) {
  FilterState st = FilterState::initial(Vec::Zero(2));
  Vec y(2);
  y << 1, -2;
  EXPECT_EQ((error_term(st, y, SamplingMask::all(2)) - y).cwiseAbs().maxCoeff(),
            0.0);
  // Empty sampling set: zero error regardless of y.
  EXPECT_EQ(error_term(st, y, SamplingMask({}, 2)).cwiseAbs().maxCoeff(), 0.0);
  st.estimate = y;
  EXPECT_EQ(error_term(st, y, SamplingMask::all(2)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(error_term(st, Vec::Zero(3), SamplingMask::all(2)),
               DimensionError);
}

TEST(Step, ZeroErrorLeavesEstimateUnchanged) {
  Fixture f(8, 5, 5);
  Rng rng(1);
  const Vec x = testsupport::random_vector(8, rng);
  for (FilterMethod m : {FilterMethod::glms, FilterMethod::glmp,
                         FilterMethod::gsign, FilterMethod::gnlms,
                         FilterMethod::gnlmp}) {
    const auto cfg = config_for(m, 8, 4, 0.7, 1.5);
    const FilterState next =
        step(cfg, FilterState::initial(x), x, f.mask, f.basis);
    EXPECT_EQ((next.estimate - x).cwiseAbs().maxCoeff(), 0.0) << to_string(m);
  }
}

TEST(Step, ScalarLmsStep) {
  // 1-node graph: L = 0, U = 1, all-pass band. x' = x + mu * (y - x).
  const GftBasis basis = gft_basis(Mat::Zero(1, 1));
  AdaptiveFilterConfig cfg;
  cfg.method = FilterMethod::glms;
  cfg.step_size = 0.5;
  cfg.band_filter = SpectralFilter::all_pass(1);
  Vec y(1);
  y << 1.0;
  const FilterState next = step(cfg, FilterState::initial(Vec::Zero(1)), y,
                                SamplingMask::all(1), basis);
  EXPECT_NEAR(next.estimate[0], 0.5, 1e-15);
  EXPECT_EQ(next.timestep, 1);
}

TEST(Step, GlmpAtPOneEqualsGsignExactly) {
  Fixture f(10, 17, 6);
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec x = testsupport::random_vector(10, rng, 2.0);
    const Vec y = testsupport::random_vector(10, rng, 2.0);
    const auto glmp1 = config_for(FilterMethod::glmp, 10, 5, 0.4, 1.0);
    const auto gsign = config_for(FilterMethod::gsign, 10, 5, 0.4);
    const Vec a =
        step(glmp1, FilterState::initial(x), y, f.mask, f.basis).estimate;
    const Vec b =
        step(gsign, FilterState::initial(x), y, f.mask, f.basis).estimate;
    EXPECT_EQ((a - b).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Step, GlmpAtPTwoEqualsGlmsExactly) {
  Fixture f(10, 19, 7);
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec x = testsupport::random_vector(10, rng, 2.0);
    const Vec y = testsupport::random_vector(10, rng, 2.0);
    const auto glmp2 = config_for(FilterMethod::glmp, 10, 6, 0.3, 2.0);
    const auto glms = config_for(FilterMethod::glms, 10, 6, 0.3);
    const Vec a =
        step(glmp2, FilterState::initial(x), y, f.mask, f.basis).estimate;
    const Vec b =
        step(glms, FilterState::initial(x), y, f.mask, f.basis).estimate;
    EXPECT_EQ((a - b).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Step, NormalizedVariantsTrackSpectralEnergy) {
  Fixture f(8, 23, 6);
  Rng rng(4);
  const Vec x = testsupport::random_vector(8, rng, 1.0);
  const Vec y = testsupport::random_vector(8, rng, 1.0);
  const auto cfg = config_for(FilterMethod::gnlms, 8, 4, 0.2);
  const FilterState s0 = FilterState::initial(x);
  const FilterState s1 = step(cfg, s0, y, f.mask, f.basis);
  // Energy estimate refreshed from the first error spectrum.
  const Vec eps = error_term(s0, y, f.mask);
  const Vec spectrum = f.basis.eigenvectors().transpose() * eps;
  const Vec expected = 0.1 * spectrum.array().square().matrix();
  EXPECT_LT((s1.spectral_energy - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Step, DivergenceRaisesWithTimestep) {
  const GftBasis basis = gft_basis(Mat::Zero(1, 1));
  AdaptiveFilterConfig cfg;
  cfg.method = FilterMethod::glms;
  cfg.step_size = 1e308;
  cfg.band_filter = SpectralFilter::all_pass(1);
  FilterState st = FilterState::initial(Vec::Zero(1));
  st.timestep = 41;
  Vec y(1);
  y << 1e308;
  try {
    step(cfg, st, y, SamplingMask::all(1), basis);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.timestep(), 41);
  }
}

// Scalar contraction oracle: on a 1-node graph the GLMS error obeys
// |e[t+1]| = |1 - mu| |e[t]|, so the distance to a constant target is
// monotonically nonincreasing for mu in (0, 2).
TEST(RunOnline, ConvergesOnConstantSignal) {
  const GftBasis basis = gft_basis(Mat::Zero(1, 1));
  AdaptiveFilterConfig cfg;
  cfg.method = FilterMethod::glms;
  cfg.step_size = 0.3;
  cfg.band_filter = SpectralFilter::all_pass(1);
  Vec target(1);
  target << 2.0;
  std::vector<Vec> obs(30, target);
  const auto preds = run_online(cfg, Vec::Zero(1), obs, SamplingMask::all(1), basis);
  ASSERT_EQ(preds.size(), obs.size());
  for (size_t t = 1; t < preds.size(); ++t) {
    const double before = std::abs(preds[t - 1][0] - 2.0);
    const double after = std::abs(preds[t][0] - 2.0);
    EXPECT_LE(after, before + 1e-15);
    EXPECT_NEAR(after, std::abs(1.0 - cfg.step_size) * before, 1e-12);
  }
}

TEST(RunOnline, EmptyStreamGivesEmptyPredictions) {
  const GftBasis basis = gft_basis(Mat::Zero(1, 1));
  auto cfg = config_for(FilterMethod::glms, 1, 1, 0.5);
  EXPECT_TRUE(
      run_online(cfg, Vec::Zero(1), {}, SamplingMask::all(1), basis).empty());
}

TEST(RunOnline, PredictionsAreOneStepAhead) {
  // The t-th prediction must not depend on y[t].
  Fixture f(6, 29, 4);
  auto cfg = config_for(FilterMethod::glms, 6, 3, 0.4);
  Rng rng(6);
  std::vector<Vec> obs1, obs2;
  for (int t = 0; t < 5; ++t) {
    obs1.push_back(testsupport::random_vector(6, rng));
    obs2.push_back(obs1.back());
  }
  obs2.back() = testsupport::random_vector(6, rng, 9.0);  // differs only at the last timestep
  const Vec x0 = Vec::Zero(6);
  const auto p1 = run_online(cfg, x0, obs1, f.mask, f.basis);
  const auto p2 = run_online(cfg, x0, obs2, f.mask, f.basis);
  EXPECT_EQ((p1.back() - p2.back()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Step, GsignUpdateMagnitudeBounded) {
  Fixture f(9, 31, 6);
  Rng rng(8);
  const auto cfg = config_for(FilterMethod::gsign, 9, 4, 0.25);
  const Vec x = testsupport::random_vector(9, rng);
  const Vec y = testsupport::random_vector(9, rng);
  const FilterState next =
      step(cfg, FilterState::initial(x), y, f.mask, f.basis);
  // sign() outputs in {-1, 0, 1}, so the per-node move is at most
  // mu * ||B row||_1 <= mu * sqrt(N) for the orthnormal-basis projector.
  const Mat b = f.basis.eigenvectors() *
                cfg.band_filter.response().asDiagonal() *
                f.basis.eigenvectors().transpose();
  const double bound = cfg.step_size * b.cwiseAbs().rowwise().sum().maxCoeff();
  EXPECT_LE((next.estimate - x).cwiseAbs().maxCoeff(), bound + 1e-12);
}

TEST(Invariants, BandlimitedStartStaysBandlimited) {
  Fixture f(12, 37, 8);
  const int band = 5;
  Rng rng(9);
  for (FilterMethod m :
       {FilterMethod::glms, FilterMethod::glmp, FilterMethod::gsign}) {
    const auto cfg = config_for(m, 12, band, 0.3, 1.4);
    // Bandlimited initial estimate.
    Vec s = Vec::Zero(12);
    for (int i = 0; i < band; ++i) s[i] = 2.0 * rng.uniform() - 1.0;
    FilterState st = FilterState::initial(inverse_gft(f.basis, s));
    for (int t = 0; t < 40; ++t) {
      const Vec y = testsupport::random_vector(12, rng, 2.0);
      st = step(cfg, st, y, f.mask, f.basis);
      const Vec projected =
          apply_spectral_filter(f.basis, cfg.band_filter, st.estimate);
      ASSERT_LT((projected - st.estimate).cwiseAbs().maxCoeff(), 1e-8);
    }
  }
}

TEST(Invariants, UnobservedNodesNeverEnterTheError) {
  Fixture f(10, 41, 5);
  const auto cfg = config_for(FilterMethod::glmp, 10, 4, 0.5, 1.3);
  Rng rng(10);
  const Vec x = testsupport::random_vector(10, rng);
  Vec y1 = testsupport::random_vector(10, rng);
  Vec y2 = y1;
  for (int i = 0; i < 10; ++i) {
    bool observed = false;
    for (int o : f.mask.observed()) observed = observed || o == i;
    if (!observed) y2[i] += 100.0;  // garbage at unobserved nodes
  }
  const Vec a = step(cfg, FilterState::initial(x), y1, f.mask, f.basis).estimate;
  const Vec b = step(cfg, FilterState::initial(x), y2, f.mask, f.basis).estimate;
  EXPECT_EQ((a - b).cwiseAbs().maxCoeff(), 0.0);
}
