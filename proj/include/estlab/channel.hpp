// SPDX-License-Identifier: Apache-2.0
//
// Power delay profiles, Rayleigh tap sampling and the frequency-domain view of a
// sample-spaced tapped delay line on the pilot subcarriers.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "estlab/errors.hpp"
#include "estlab/numerics.hpp"

namespace estlab {

struct Tap {
  std::size_t delay = 0;  // samples at the system rate
  double power = 0.0;
};

struct PowerDelayProfile {
  std::vector<Tap> taps;
  std::string label;

  std::size_t size() const noexcept { return taps.size(); }
  std::size_t max_delay() const noexcept { return taps.empty() ? 0 : taps.back().delay; }

  double total_power() const {
    double s = 0.0;
    for (const auto& t : taps) s += t.power;
    return s;
  }
};

/// Sorts by delay, merges taps that share a delay and normalizes to unit power.
inline PowerDelayProfile normalize_pdp(std::vector<Tap> taps, std::string label) {
  if (taps.empty()) throw InvalidDimension("power delay profile needs at least one tap");
  std::stable_sort(taps.begin(), taps.end(), [](const Tap& a, const Tap& b) { return a.delay < b.delay; });
  std::vector<Tap> merged;
  for (const auto& t : taps) {
    if (!(t.power > 0.0) || !std::isfinite(t.power)) throw ConfigError("tap powers must be positive and finite");
    if (!merged.empty() && merged.back().delay == t.delay)
      merged.back().power += t.power;
    else
      merged.push_back(t);
  }
  double total = 0.0;
  for (const auto& t : merged) total += t.power;
  for (auto& t : merged) t.power /= total;
  return {std::move(merged), std::move(label)};
}

/// Exponential profile alpha(l) = exp(beta * l), l = 0..L-1.
inline PowerDelayProfile exp_pdp(double beta, std::size_t taps) {
  if (taps == 0) throw InvalidDimension("exp_pdp: tap count must be at least 1");
  if (!(beta <= 0.0)) throw ConfigError("exp_pdp: beta must be non-positive");
  std::vector<Tap> t(taps);
  for (std::size_t l = 0; l < taps; ++l) t[l] = {l, std::exp(beta * static_cast<double>(l))};
  std::ostringstream label;
  label << "exp(beta=" << beta << ",L=" << taps << ")";
  return normalize_pdp(std::move(t), label.str());
}

enum class TdlProfile { A, C };

namespace detail {

struct TdlEntry {
  double normalized_delay;
  double power_db;
};

// 3GPP TR 38.901 V16, Table 7.7.2-1 (TDL-A) and Table 7.7.2-3 (TDL-C).
// Delays are normalized to the RMS delay spread.
inline constexpr std::array<TdlEntry, 23> kTdlA{{
    {0.0000, -13.4}, {0.3819, 0.0},   {0.4025, -2.2},  {0.5868, -4.0},  {0.4610, -6.0},  {0.5375, -8.2},
    {0.6708, -9.9},  {0.5750, -10.5}, {0.7618, -7.5},  {1.5375, -15.9}, {1.8978, -6.6},  {2.2242, -16.7},
    {2.1718, -12.4}, {2.4942, -15.2}, {2.5119, -10.8}, {3.0582, -11.3}, {4.0810, -12.7}, {4.4579, -16.2},
    {4.5695, -18.3}, {4.7966, -18.9}, {5.0066, -16.6}, {5.3043, -19.9}, {9.6586, -29.7},
}};

inline constexpr std::array<TdlEntry, 24> kTdlC{{
    {0.0000, -4.4},  {0.2099, -1.2},  {0.2219, -3.5},  {0.2329, -5.2},  {0.2176, -2.5},  {0.6366, 0.0},
    {0.6448, -2.2},  {0.6560, -3.9},  {0.6584, -7.4},  {0.7935, -7.1},  {0.8213, -10.7}, {0.9336, -11.1},
    {1.2285, -5.1},  {1.3083, -6.8},  {2.1704, -8.7},  {2.7105, -13.2}, {4.2589, -13.9}, {4.6003, -13.9},
    {5.4902, -15.8}, {5.6077, -17.1}, {6.3065, -16.0}, {6.6374, -15.7}, {7.0427, -21.6}, {8.6523, -22.8},
}};

}  // namespace detail

inline std::span<const detail::TdlEntry> tdl_table(TdlProfile profile) {
  if (profile == TdlProfile::A) return detail::kTdlA;
  return detail::kTdlC;
}

inline TdlProfile parse_tdl_profile(std::string_view name) {
  if (name == "TDL-A" || name == "tdla" || name == "A") return TdlProfile::A;
  if (name == "TDL-C" || name == "tdlc" || name == "C") return TdlProfile::C;
  throw ConfigError("unknown TDL profile '" + std::string(name) + "'");
}

/// 3GPP TDL profile scaled to `delay_spread` seconds and rounded onto the sample grid.
inline PowerDelayProfile tdl_pdp(TdlProfile profile, double delay_spread, double sample_rate) {
  if (!(delay_spread > 0.0)) throw ConfigError("tdl_pdp: delay spread must be positive");
  if (!(sample_rate > 0.0)) throw ConfigError("tdl_pdp: sample rate must be positive");
  std::vector<Tap> taps;
  for (const auto& e : tdl_table(profile)) {
    const double d = std::round(e.normalized_delay * delay_spread * sample_rate);
    taps.push_back({static_cast<std::size_t>(d), std::pow(10.0, e.power_db / 10.0)});
  }
  std::ostringstream label;
  label << (profile == TdlProfile::A ? "TDL-A" : "TDL-C") << "(DS=" << delay_spread * 1e9 << "ns)";
  return normalize_pdp(std::move(taps), label.str());
}

inline PowerDelayProfile tdl_pdp(std::string_view profile, double delay_spread, double sample_rate) {
  return tdl_pdp(parse_tdl_profile(profile), delay_spread, sample_rate);
}

/// One equal-power tap per sample from 0 to round(max_delay * sample_rate).
inline PowerDelayProfile equal_pdp(double max_delay, double sample_rate) {
  if (!(max_delay > 0.0)) throw ConfigError("equal_pdp: maximum delay must be positive");
  const auto last = static_cast<std::size_t>(std::round(max_delay * sample_rate));
  std::vector<Tap> taps(last + 1);
  for (std::size_t l = 0; l <= last; ++l) taps[l] = {l, 1.0};
  std::ostringstream label;
  label << "equal(max=" << max_delay * 1e6 << "us)";
  return normalize_pdp(std::move(taps), label.str());
}

/// Two-column "delay_samples power" listing.
inline std::string to_text(const PowerDelayProfile& pdp) {
  std::ostringstream os;
  os.precision(9);
  os << "# " << pdp.label << "\n";
  for (const auto& t : pdp.taps) os << t.delay << ' ' << t.power << '\n';
  return os.str();
}

struct GridSpec {
  std::size_t M = 2048;
  std::size_t P = 120;
  std::vector<std::size_t> pilot_indices;
  double sample_rate = 30.72e6;
  std::size_t cp_samples = 144;

  /// Pilots on every second subcarrier of an allocation starting at `first`.
  static GridSpec uniform(std::size_t M, std::size_t P, std::size_t first = 0, double sample_rate = 30.72e6,
                          std::size_t cp_samples = 144) {
    GridSpec g;
    g.M = M;
    g.P = P;
    g.sample_rate = sample_rate;
    g.cp_samples = cp_samples;
    g.pilot_indices.resize(P);
    for (std::size_t p = 0; p < P; ++p) g.pilot_indices[p] = first + 2 * p;
    g.validate();
    return g;
  }

  void validate() const {
    if (P == 0) throw InvalidDimension("grid: pilot count must be positive");
    if (2 * P > M) throw ConfigError("grid: 2P must not exceed M");
    if (pilot_indices.size() != P) throw ConfigError("grid: pilot index list length differs from P");
    for (std::size_t p = 0; p < P; ++p) {
      if (pilot_indices[p] >= M) throw ConfigError("grid: pilot index beyond M");
      if (p > 0 && pilot_indices[p] <= pilot_indices[p - 1]) throw ConfigError("grid: pilot indices must increase");
    }
  }
};

/// Block-static tap gains, g_l ~ CN(0, alpha(l)).
inline CVector sample_taps(const PowerDelayProfile& pdp, RngStream& stream) {
  CVector g(pdp.size());
  for (std::size_t l = 0; l < pdp.size(); ++l) g[l] = std::sqrt(pdp.taps[l].power) * stream.cnormal();
  return g;
}

namespace detail {

inline cplx delay_phasor(std::size_t subcarrier, std::size_t delay, std::size_t M) {
  // exp(-j 2 pi k d / M) with k*d reduced modulo M first.
  const auto kd = static_cast<double>((subcarrier * delay) % M);
  return std::polar(1.0, -2.0 * std::numbers::pi * kd / static_cast<double>(M));
}

inline void require_resolvable(const PowerDelayProfile& pdp, const GridSpec& grid) {
  if (pdp.max_delay() >= grid.M) throw ConfigError("tap delay is not resolvable on an M-point grid");
}

}  // namespace detail

/// h_p = sum_l g_l exp(-j 2 pi k_p d_l / M).
inline CVector freq_response(std::span<const cplx> taps, const PowerDelayProfile& pdp, const GridSpec& grid) {
  if (taps.size() != pdp.size()) throw ShapeError("freq_response: taps not aligned to profile");
  detail::require_resolvable(pdp, grid);
  CVector h(grid.P);
  for (std::size_t p = 0; p < grid.P; ++p) {
    cplx acc = 0.0;
    for (std::size_t l = 0; l < pdp.size(); ++l)
      acc += taps[l] * detail::delay_phasor(grid.pilot_indices[p], pdp.taps[l].delay, grid.M);
    h[p] = acc;
  }
  return h;
}

/// Precomputed P x L phasor table so repeated freq_response calls are a matrix-vector product.
class ResponseMap {
 public:
  ResponseMap(const PowerDelayProfile& pdp, const GridSpec& grid) : map_(grid.P, pdp.size()) {
    detail::require_resolvable(pdp, grid);
    for (std::size_t p = 0; p < grid.P; ++p)
      for (std::size_t l = 0; l < pdp.size(); ++l)
        map_(p, l) = detail::delay_phasor(grid.pilot_indices[p], pdp.taps[l].delay, grid.M);
  }

  CVector operator()(std::span<const cplx> taps) const { return map_ * taps; }

 private:
  ComplexMatrix map_;
};

/// Analytic pilot-grid covariance R[m][n] = sum_l alpha(l) exp(-j 2 pi (k_m - k_n) d_l / M).
inline ComplexMatrix covariance(const PowerDelayProfile& pdp, const GridSpec& grid) {
  detail::require_resolvable(pdp, grid);
  ComplexMatrix r(grid.P, grid.P);
  for (std::size_t m = 0; m < grid.P; ++m) {
    r(m, m) = pdp.total_power();
    for (std::size_t n = m + 1; n < grid.P; ++n) {
      const std::size_t dk = grid.pilot_indices[n] - grid.pilot_indices[m];
      cplx acc = 0.0;
      // k_m - k_n = -dk, so each term is exp(+j 2 pi dk d / M).
      for (const auto& t : pdp.taps) acc += t.power * std::conj(detail::delay_phasor(dk, t.delay, grid.M));
      r(m, n) = acc;
      r(n, m) = std::conj(acc);
    }
  }
  return r;
}

/// Rows/columns 0, 2, 4, ... of a pilot-grid matrix.
inline ComplexMatrix even_subgrid(const ComplexMatrix& r) {
  const std::size_t n = (r.rows() + 1) / 2;
  ComplexMatrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = r(2 * i, 2 * j);
  return s;
}

/// Tap gains for the 2 x 2 links, indexed [tx port][rx antenna]. A silent
/// second port has empty tap vectors.
struct ChannelRealization {
  std::array<std::array<CVector, 2>, 2> taps;

  static ChannelRealization draw(const PowerDelayProfile& port1, const std::optional<PowerDelayProfile>& port2,
                                 const RngStream& stream) {
    ChannelRealization c;
    for (std::size_t r = 0; r < 2; ++r) {
      auto s1 = stream.split(r);
      c.taps[0][r] = sample_taps(port1, s1);
      if (port2) {
        auto s2 = stream.split(2 + r);
        c.taps[1][r] = sample_taps(*port2, s2);
      }
    }
    return c;
  }
};

}  // namespace estlab
