#include <gtest/gtest.h>

#include <sstream>

#include "estlab/config.hpp"

using namespace estlab;

namespace {

Settings parse(const std::string& text) {
  std::istringstream in(text);
  return parse_settings(in);
}

}  // namespace

TEST(Settings, KeyValueLines) {
  const auto s = parse("# scenario\nsnr = 0, 10,20\n\n  trials=50  # inline comment\nchannel2 = silent\n");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.at("snr"), "0, 10,20");
  EXPECT_EQ(s.at("trials"), "50");
  EXPECT_EQ(s.at("channel2"), "silent");
}

TEST(Settings, LaterLinesOverride) { EXPECT_EQ(parse("seed = 1\nseed = 9\n").at("seed"), "9"); }

TEST(Settings, MalformedLines) {
  EXPECT_THROW(parse("snr 10\n"), ConfigError);
  EXPECT_THROW(parse(" = 10\n"), ConfigError);
  EXPECT_THROW(read_settings("/nonexistent/estlab.cfg"), ConfigError);
}

TEST(Scenario, DefaultsMatchReferenceSetup) {
  const auto cfg = scenario_from_settings({});
  EXPECT_EQ(cfg.grid.M, 2048u);
  EXPECT_EQ(cfg.grid.P, 120u);
  EXPECT_EQ(cfg.pdp_port1.size(), 40u);
  ASSERT_TRUE(cfg.pdp_port2.has_value());
  EXPECT_EQ(cfg.trials, 10000u);
  EXPECT_EQ(cfg.master_seed, 1u);
  EXPECT_EQ(cfg.data_symbols_per_slot, 6u);
}

TEST(Scenario, AllKeys) {
  const auto cfg = scenario_from_settings(parse(
      "snr = 5, 15\ntrials = 12\nestimators = dft, spmmse\nchannel1 = tdla:100\nchannel2 = silent\nseed = 0x10\n"
      "M = 1024\nP = 60\nfirst_subcarrier = 4\nsample_rate = 15.36e6\ncp = 72\ndata_symbols = 2\nworkers = 3\n"
      "delta_cs = 30\nocc_noise = literal\nout = x.csv\n"));
  EXPECT_EQ(cfg.snr_db, (std::vector<double>{5.0, 15.0}));
  EXPECT_EQ(cfg.trials, 12u);
  EXPECT_EQ(cfg.estimators, (std::vector<Estimator>{Estimator::Dft, Estimator::SinglePortMmse}));
  EXPECT_FALSE(cfg.pdp_port2.has_value());
  EXPECT_EQ(cfg.master_seed, 16u);
  EXPECT_EQ(cfg.grid.M, 1024u);
  EXPECT_EQ(cfg.grid.P, 60u);
  EXPECT_EQ(cfg.grid.pilot_indices.front(), 4u);
  EXPECT_EQ(cfg.grid.sample_rate, 15.36e6);
  EXPECT_EQ(cfg.grid.cp_samples, 72u);
  EXPECT_EQ(cfg.data_symbols_per_slot, 2u);
  EXPECT_EQ(cfg.workers, 3u);
  EXPECT_EQ(cfg.delta_cs, 30u);
  EXPECT_EQ(cfg.occ_noise, OccNoise::Literal);
}

TEST(Scenario, TdlDelaysFollowSampleRate) {
  const auto a = scenario_from_settings(parse("channel1 = tdlc:300\n"));
  const auto b = scenario_from_settings(parse("channel1 = tdlc:300\nsample_rate = 15.36e6\n"));
  EXPECT_EQ(a.pdp_port1.max_delay(), 80u);
  EXPECT_EQ(b.pdp_port1.max_delay(), 40u);
}

TEST(Scenario, Errors) {
  for (const char* text : {"bogus = 1\n", "trials = -3\n", "trials = 0\n", "trials = 1.5\n", "snr = ten\n", "snr = ,\n",
                           "estimators = dft,ls\n", "channel1 = silent\n", "channel2 = tdlq:3\n", "P = 2000\n",
                           "occ_noise = double\n", "seed = abc\n", "sample_rate = -1\n", "channel1 = equal:100\nM = 256\nP = 8\n"})
    EXPECT_THROW(scenario_from_settings(parse(text)), ConfigError) << text;
  EXPECT_THROW(scenario_from_settings(parse("P = 0\n")), InvalidDimension);
}

TEST(Lists, Parsing) {
  EXPECT_EQ(parse_snr_list("-5,0 , 2.5"), (std::vector<double>{-5.0, 0.0, 2.5}));
  EXPECT_EQ(parse_estimator_list("occ,fmmse,pmmse"),
            (std::vector<Estimator>{Estimator::Occ, Estimator::FMmse, Estimator::PMmse}));
  EXPECT_THROW(parse_snr_list(""), ConfigError);
  EXPECT_THROW(parse_estimator_list(" , "), ConfigError);
}
