#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "estlab/channel.hpp"
#include "support.hpp"

using namespace estlab;
using estlab::testing::max_abs_diff;
using estlab::testing::PlainRng;

namespace {

double power_sum(const PowerDelayProfile& pdp) {
  double s = 0.0;
  for (const auto& t : pdp.taps) s += t.power;
  return s;
}

void expect_valid_pdp(const PowerDelayProfile& pdp) {
  ASSERT_FALSE(pdp.taps.empty());
  EXPECT_NEAR(power_sum(pdp), 1.0, 1e-12);
  for (std::size_t l = 0; l < pdp.size(); ++l) {
    EXPECT_GT(pdp.taps[l].power, 0.0);
    if (l > 0) {
      EXPECT_GT(pdp.taps[l].delay, pdp.taps[l - 1].delay);
    }
  }
}

// Direct M-point DFT of the zero-padded impulse response, read at the pilot bins.
CVector dft_oracle(std::span<const cplx> taps, const PowerDelayProfile& pdp, const GridSpec& grid) {
  CVector impulse(grid.M);
  for (std::size_t l = 0; l < pdp.size(); ++l) impulse[pdp.taps[l].delay] += taps[l];
  CVector h(grid.P);
  for (std::size_t p = 0; p < grid.P; ++p) {
    const auto k = static_cast<double>(grid.pilot_indices[p]);
    cplx acc = 0.0;
    for (std::size_t n = 0; n < grid.M; ++n)
      if (impulse[n] != cplx(0.0)) acc += impulse[n] * std::exp(cplx(0.0, -2.0 * std::numbers::pi * k * n / grid.M));
    h[p] = acc;
  }
  return h;
}

Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

}  // namespace

TEST(ExpPdp, FlatProfile) {
  const auto pdp = exp_pdp(0.0, 4);
  ASSERT_EQ(pdp.size(), 4u);
  for (std::size_t l = 0; l < 4; ++l) {
    EXPECT_EQ(pdp.taps[l].delay, l);
    EXPECT_NEAR(pdp.taps[l].power, 0.25, 1e-15);
  }
}

TEST(ExpPdp, DecayMatchesExponential) {
  const auto pdp = exp_pdp(-0.05, 40);
  ASSERT_EQ(pdp.size(), 40u);
  // Normalization cancels in the ratio to tap 0, exposing alpha(39) = e^{-1.95}.
  EXPECT_NEAR(pdp.taps[39].power / pdp.taps[0].power, std::exp(-1.95), 1e-14);
}

TEST(ExpPdp, UnitPowerAndValidity) {
  for (double beta : {0.0, -0.0005, -0.05, -0.3, -2.0})
    for (std::size_t L : {1u, 2u, 40u, 100u}) expect_valid_pdp(exp_pdp(beta, L));
}

TEST(ExpPdp, Errors) {
  EXPECT_THROW(exp_pdp(-0.1, 0), InvalidDimension);
  EXPECT_THROW(exp_pdp(0.1, 4), ConfigError);
}

TEST(TdlPdp, CollapsesToSingleTap) {
  const auto pdp = tdl_pdp(TdlProfile::C, 1e-12, 30.72e6);
  ASSERT_EQ(pdp.size(), 1u);
  EXPECT_EQ(pdp.taps[0].delay, 0u);
  EXPECT_NEAR(pdp.taps[0].power, 1.0, 1e-15);
}

TEST(TdlPdp, TdlAFirstTapAtZero) {
  const auto pdp = tdl_pdp(TdlProfile::A, 100e-9, 30.72e6);
  expect_valid_pdp(pdp);
  EXPECT_EQ(pdp.taps.front().delay, 0u);
}

TEST(TdlPdp, TdlCMaxDelay) {
  const auto pdp = tdl_pdp(TdlProfile::C, 300e-9, 30.72e6);
  expect_valid_pdp(pdp);
  EXPECT_EQ(pdp.max_delay(), static_cast<std::size_t>(std::lround(8.6523 * 300e-9 * 30.72e6)));
  EXPECT_EQ(pdp.max_delay(), 80u);
}

TEST(TdlPdp, TablesHaveExpectedShape) {
  EXPECT_EQ(tdl_table(TdlProfile::A).size(), 23u);
  EXPECT_EQ(tdl_table(TdlProfile::C).size(), 24u);
  EXPECT_EQ(tdl_table(TdlProfile::A).front().normalized_delay, 0.0);
  EXPECT_EQ(tdl_table(TdlProfile::C).front().normalized_delay, 0.0);
}

TEST(TdlPdp, MergedPowerIsPreserved) {
  // At 100 ns, several TDL-A taps collide on the same sample.
  const auto pdp = tdl_pdp(TdlProfile::A, 100e-9, 30.72e6);
  EXPECT_LT(pdp.size(), tdl_table(TdlProfile::A).size());
  double raw = 0.0, tap_at_1 = 0.0;
  for (const auto& e : tdl_table(TdlProfile::A)) {
    const double w = std::pow(10.0, e.power_db / 10.0);
    raw += w;
    if (std::lround(e.normalized_delay * 100e-9 * 30.72e6) == 1) tap_at_1 += w;
  }
  bool found = false;
  for (const auto& t : pdp.taps) {
    if (t.delay != 1) continue;
    found = true;
    EXPECT_NEAR(t.power, tap_at_1 / raw, 1e-14);
  }
  EXPECT_TRUE(found);
}

TEST(TdlPdp, UnknownProfileRejected) {
  EXPECT_THROW(tdl_pdp("TDL-Z", 100e-9, 30.72e6), ConfigError);
  EXPECT_NO_THROW(tdl_pdp("TDL-A", 100e-9, 30.72e6));
}

TEST(EqualPdp, PaperSpread) {
  const auto pdp = equal_pdp(9.6586e-6, 30.72e6);
  ASSERT_EQ(pdp.size(), 298u);
  EXPECT_EQ(pdp.max_delay(), 297u);
  for (const auto& t : pdp.taps) EXPECT_NEAR(t.power, 1.0 / 298.0, 1e-15);
  expect_valid_pdp(pdp);
}

TEST(EqualPdp, TinySpreadIsSingleTap) {
  const auto pdp = equal_pdp(1e-12, 30.72e6);
  ASSERT_EQ(pdp.size(), 1u);
  EXPECT_NEAR(pdp.taps[0].power, 1.0, 1e-15);
}

TEST(PdpText, TwoColumns) {
  const auto text = to_text(exp_pdp(0.0, 2));
  EXPECT_NE(text.find("0 0.5\n"), std::string::npos);
  EXPECT_NE(text.find("1 0.5\n"), std::string::npos);
  EXPECT_EQ(text.front(), '#');
}

TEST(SampleTaps, SingleTapPower) {
  const auto pdp = exp_pdp(0.0, 1);
  RngStream s(3);
  double acc = 0.0;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) acc += std::norm(sample_taps(pdp, s)[0]);
  EXPECT_NEAR(acc / n, 1.0, 0.02);
}

TEST(SampleTaps, PerTapVariance) {
  const auto pdp = exp_pdp(-0.5, 5);
  RngStream s(4);
  std::vector<double> acc(pdp.size(), 0.0);
  const int n = 100'000;
  for (int i = 0; i < n; ++i) {
    const auto g = sample_taps(pdp, s);
    for (std::size_t l = 0; l < g.size(); ++l) acc[l] += std::norm(g[l]);
  }
  for (std::size_t l = 0; l < pdp.size(); ++l) EXPECT_NEAR(acc[l] / n / pdp.taps[l].power, 1.0, 0.03) << "tap " << l;
}

TEST(SampleTaps, Deterministic) {
  const auto pdp = exp_pdp(-0.05, 40);
  RngStream a(10), b(10);
  EXPECT_EQ(sample_taps(pdp, a), sample_taps(pdp, b));
}

TEST(FreqResponse, FlatChannel) {
  const auto grid = GridSpec::uniform(2048, 120);
  const auto pdp = exp_pdp(0.0, 1);
  const CVector g{cplx(1.0)};
  for (const auto& h : freq_response(g, pdp, grid)) EXPECT_LT(std::abs(h - cplx(1.0)), 1e-15);
}

TEST(FreqResponse, SingleDelayedTap) {
  const std::size_t M = 512, d = 7, k0 = 3;
  const auto grid = GridSpec::uniform(M, 64, k0);
  const PowerDelayProfile pdp{{{d, 1.0}}, "one"};
  const CVector g{cplx(1.0)};
  const auto h = freq_response(g, pdp, grid);
  for (std::size_t p = 0; p < grid.P; ++p) {
    const double ph = -4.0 * std::numbers::pi * p * d / M - 2.0 * std::numbers::pi * k0 * d / M;
    EXPECT_LT(std::abs(h[p] - std::polar(1.0, ph)), 1e-12);
  }
}

TEST(FreqResponse, TwoTapDftOracle) {
  const auto grid = GridSpec::uniform(64, 16);
  const PowerDelayProfile pdp{{{0, 0.5}, {5, 0.5}}, "two"};
  const CVector g{cplx(0.3, -0.2), cplx(-1.1, 0.4)};
  EXPECT_LE(max_abs_diff(freq_response(g, pdp, grid), dft_oracle(g, pdp, grid)), 1e-12);
}

TEST(FreqResponse, RandomChannelsMatchDftOracle) {
  const auto grid = GridSpec::uniform(2048, 120, 5);
  const auto pdp = tdl_pdp(TdlProfile::C, 300e-9, 30.72e6);
  const ResponseMap map(pdp, grid);
  RngStream s(77);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto g = sample_taps(pdp, s);
    const auto ref = dft_oracle(g, pdp, grid);
    worst = std::max(worst, max_abs_diff(freq_response(g, pdp, grid), ref));
    worst = std::max(worst, max_abs_diff(map(g), ref));
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(FreqResponse, Errors) {
  const auto grid = GridSpec::uniform(16, 8);
  const PowerDelayProfile far{{{16, 1.0}}, "far"};
  EXPECT_THROW(freq_response(CVector{1.0}, far, grid), ConfigError);
  EXPECT_THROW(freq_response(CVector{1.0, 1.0}, exp_pdp(0.0, 1), grid), ShapeError);
}

TEST(Covariance, SingleTapIsAllOnes) {
  const auto grid = GridSpec::uniform(256, 32);
  const auto r = covariance(exp_pdp(0.0, 1), grid);
  for (const auto& v : r.entries()) EXPECT_LT(std::abs(v - cplx(1.0)), 1e-15);
}

TEST(Covariance, TwoTapAdjacentEntry) {
  const auto grid = GridSpec::uniform(8, 4);
  const auto r = covariance(exp_pdp(0.0, 2), grid);
  // k_1 - k_0 = 2: 0.5 (1 + e^{-j pi / 2}).
  EXPECT_LT(std::abs(r(1, 0) - cplx(0.5, -0.5)), 1e-15);
  EXPECT_LT(std::abs(r(0, 1) - cplx(0.5, 0.5)), 1e-15);
}

TEST(Covariance, StructuralProperties) {
  PlainRng rng(21);
  const auto grid = GridSpec::uniform(2048, 120);
  std::vector<PowerDelayProfile> pdps{exp_pdp(-0.0005, 40), exp_pdp(-0.05, 40), tdl_pdp(TdlProfile::A, 100e-9, 30.72e6),
                                      tdl_pdp(TdlProfile::C, 300e-9, 30.72e6), equal_pdp(9.6586e-6, 30.72e6)};
  for (int i = 0; i < 5; ++i) pdps.push_back(rng.random_pdp(80));
  for (const auto& pdp : pdps) {
    const auto r = covariance(pdp, grid);
    EXPECT_LE(r.hermitian_deviation(), 1e-12) << pdp.label;
    double toeplitz = 0.0;
    for (std::size_t m = 0; m < grid.P; ++m) {
      EXPECT_NEAR(r(m, m).real(), 1.0, 1e-12);
      EXPECT_NEAR(r(m, m).imag(), 0.0, 1e-12);
      for (std::size_t n = 1; n + m < grid.P; ++n) toeplitz = std::max(toeplitz, std::abs(r(m + n, m) - r(n, 0)));
    }
    EXPECT_LE(toeplitz, 1e-12) << pdp.label;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(to_eigen(r), Eigen::EigenvaluesOnly);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10) << pdp.label;
  }
}

TEST(Covariance, AnalyticExpectationOfOuterProduct) {
  // E{h h^H} = A diag(alpha) A^H with A the tap-to-pilot response map.
  const auto grid = GridSpec::uniform(1024, 40, 2);
  const auto pdp = tdl_pdp(TdlProfile::A, 100e-9, 30.72e6);
  ComplexMatrix expected(grid.P, grid.P);
  for (std::size_t l = 0; l < pdp.size(); ++l) {
    CVector unit(pdp.size());
    unit[l] = 1.0;
    const auto a = freq_response(unit, pdp, grid);
    for (std::size_t m = 0; m < grid.P; ++m)
      for (std::size_t n = 0; n < grid.P; ++n) expected(m, n) += pdp.taps[l].power * a[m] * std::conj(a[n]);
  }
  EXPECT_LE(max_abs_diff(covariance(pdp, grid), expected), 1e-12);
}

TEST(Covariance, MonteCarloAgreement) {
  const auto grid = GridSpec::uniform(256, 16);
  const auto pdp = exp_pdp(-0.2, 8);
  const ResponseMap map(pdp, grid);
  RngStream s(31);
  ComplexMatrix acc(grid.P, grid.P);
  const int n = 100'000;
  for (int i = 0; i < n; ++i) {
    const auto h = map(sample_taps(pdp, s));
    for (std::size_t a = 0; a < grid.P; ++a)
      for (std::size_t b = 0; b < grid.P; ++b) acc(a, b) += h[a] * std::conj(h[b]);
  }
  acc *= 1.0 / n;
  EXPECT_LE(max_abs_diff(acc, covariance(pdp, grid)), 0.02);
}

TEST(Covariance, EvenSubgrid) {
  const auto grid = GridSpec::uniform(256, 8);
  const auto r = covariance(exp_pdp(-0.1, 10), grid);
  const auto s = even_subgrid(r);
  ASSERT_EQ(s.rows(), 4u);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(s(i, j), r(2 * i, 2 * j));
}

TEST(GridSpec, Validation) {
  EXPECT_THROW(GridSpec::uniform(16, 9), ConfigError);
  EXPECT_THROW(GridSpec::uniform(16, 0), InvalidDimension);
  const auto g = GridSpec::uniform(2048, 120, 4);
  EXPECT_EQ(g.pilot_indices.front(), 4u);
  EXPECT_EQ(g.pilot_indices.back(), 4u + 2 * 119);
}

TEST(ChannelRealization, LinksIndependentAndAligned) {
  const auto p1 = exp_pdp(-0.0005, 40);
  const auto p2 = tdl_pdp(TdlProfile::C, 300e-9, 30.72e6);
  const auto c = ChannelRealization::draw(p1, p2, RngStream(5));
  EXPECT_EQ(c.taps[0][0].size(), p1.size());
  EXPECT_EQ(c.taps[0][1].size(), p1.size());
  EXPECT_EQ(c.taps[1][0].size(), p2.size());
  EXPECT_NE(c.taps[0][0], c.taps[0][1]);
  const auto silent = ChannelRealization::draw(p1, std::nullopt, RngStream(5));
  EXPECT_TRUE(silent.taps[1][0].empty());
  EXPECT_EQ(silent.taps[0][0], c.taps[0][0]);
}
