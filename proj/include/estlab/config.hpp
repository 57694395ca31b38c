// SPDX-License-Identifier: Apache-2.0
//
// Plain-text scenario files: one `key = value` per line, `#` starts a comment.
// Keys mirror the CLI flags (snr, trials, estimators, channel1, channel2, seed,
// out) plus grid and harness knobs (M, P, first_subcarrier, sample_rate, cp,
// data_symbols, workers, delta_cs, occ_noise).

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "estlab/errors.hpp"
#include "estlab/harness.hpp"

namespace estlab {

using Settings = std::map<std::string, std::string, std::less<>>;

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string_view::npos ? s.size() : comma;
    auto item = trim(s.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    const auto n = std::stoull(v, &used, 0);
    if (used != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::logic_error&) {
    throw ConfigError("'" + key + "': expected a non-negative integer, got '" + v + "'");
  }
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::logic_error&) {
    throw ConfigError("'" + key + "': expected a number, got '" + v + "'");
  }
}

}  // namespace detail

inline Settings parse_settings(std::istream& in, const std::string& source = "<config>") {
  Settings s;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = detail::trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    s[std::move(key)] = detail::trim(std::string_view(t).substr(eq + 1));
  }
  return s;
}

inline Settings read_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_settings(in, path);
}

inline std::vector<double> parse_snr_list(const std::string& v) {
  std::vector<double> out;
  for (const auto& item : detail::split_list(v)) out.push_back(detail::to_double("snr", item));
  if (out.empty()) throw ConfigError("'snr': list is empty");
  return out;
}

inline std::vector<Estimator> parse_estimator_list(const std::string& v) {
  std::vector<Estimator> out;
  for (const auto& item : detail::split_list(v)) out.push_back(parse_estimator(item));
  if (out.empty()) throw ConfigError("'estimators': list is empty");
  return out;
}

/// Builds a scenario from settings on top of the defaults. Unknown keys are errors.
inline ScenarioConfig scenario_from_settings(const Settings& s) {
  static const std::vector<std::string_view> known{
      "snr",   "trials", "estimators", "channel1", "channel2", "seed",     "out",      "M",        "P",
      "first_subcarrier", "sample_rate", "cp", "data_symbols", "workers", "delta_cs", "occ_noise"};
  for (const auto& [k, v] : s)
    if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown setting '" + k + "'");

  auto get = [&](std::string_view k) -> const std::string* {
    auto it = s.find(k);
    return it == s.end() ? nullptr : &it->second;
  };

  ScenarioConfig cfg;
  std::size_t M = cfg.grid.M, P = cfg.grid.P, first = 0, cp = cfg.grid.cp_samples;
  double fs = cfg.grid.sample_rate;
  if (auto v = get("M")) M = detail::to_u64("M", *v);
  if (auto v = get("P")) P = detail::to_u64("P", *v);
  if (auto v = get("first_subcarrier")) first = detail::to_u64("first_subcarrier", *v);
  if (auto v = get("sample_rate")) fs = detail::to_double("sample_rate", *v);
  if (auto v = get("cp")) cp = detail::to_u64("cp", *v);
  if (!(fs > 0.0)) throw ConfigError("'sample_rate' must be positive");
  cfg.grid = GridSpec::uniform(M, P, first, fs, cp);

  const ChannelSpec ch1 = ChannelSpec::parse(get("channel1") ? *get("channel1") : "exp:-0.0005,40");
  const ChannelSpec ch2 = ChannelSpec::parse(get("channel2") ? *get("channel2") : "exp:-0.05,40");
  auto pdp1 = ch1.build(cfg.grid);
  if (!pdp1) throw ConfigError("channel1 cannot be silent");
  cfg.pdp_port1 = std::move(*pdp1);
  cfg.pdp_port2 = ch2.build(cfg.grid);

  if (auto v = get("snr")) cfg.snr_db = parse_snr_list(*v);
  if (auto v = get("estimators")) cfg.estimators = parse_estimator_list(*v);
  if (auto v = get("trials")) cfg.trials = detail::to_u64("trials", *v);
  if (auto v = get("seed")) cfg.master_seed = detail::to_u64("seed", *v);
  if (auto v = get("data_symbols")) cfg.data_symbols_per_slot = detail::to_u64("data_symbols", *v);
  if (auto v = get("workers")) cfg.workers = detail::to_u64("workers", *v);
  if (auto v = get("delta_cs")) cfg.delta_cs = detail::to_u64("delta_cs", *v);
  if (auto v = get("occ_noise")) {
    if (*v == "halved")
      cfg.occ_noise = OccNoise::Halved;
    else if (*v == "literal")
      cfg.occ_noise = OccNoise::Literal;
    else
      throw ConfigError("'occ_noise' must be 'halved' or 'literal'");
  }
  cfg.validate();
  return cfg;
}

}  // namespace estlab
