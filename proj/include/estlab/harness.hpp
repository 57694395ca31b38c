// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo MSE/BER sweeps over SNR.
//
// Every trial owns a random stream derived from (master seed, trial index).
// Trials are grouped into fixed-size blocks that are accumulated in order and
// then reduced in block order, so a report does not depend on the number of
// worker threads.

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "estlab/analysis.hpp"
#include "estlab/channel.hpp"
#include "estlab/dmrs.hpp"
#include "estlab/errors.hpp"
#include "estlab/estimators.hpp"
#include "estlab/numerics.hpp"

namespace estlab {

// ---------------------------------------------------------------------------
// QPSK and equalization

using Bits = std::vector<std::uint8_t>;

/// Gray mapping (b0, b1) -> ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2).
inline CVector qpsk_mod(std::span<const std::uint8_t> bits) {
  if (bits.size() % 2 != 0) throw ShapeError("qpsk_mod: bit count must be even");
  const double a = std::numbers::sqrt2 / 2.0;
  CVector s(bits.size() / 2);
  for (std::size_t i = 0; i < s.size(); ++i)
    s[i] = {bits[2 * i] ? -a : a, bits[2 * i + 1] ? -a : a};
  return s;
}

/// Hard decisions per axis; a zero component decides bit 0.
inline Bits qpsk_demod(std::span<const cplx> symbols) {
  Bits b(2 * symbols.size());
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    b[2 * i] = symbols[i].real() < 0.0 ? 1 : 0;
    b[2 * i + 1] = symbols[i].imag() < 0.0 ? 1 : 0;
  }
  return b;
}

using Mat2 = std::array<std::array<cplx, 2>, 2>;  // [rx][tx]
using Vec2 = std::array<cplx, 2>;

/// Zero-forcing per-subcarrier 2 x 2 solve. Falls back to
/// (H^H H + 1e-8 I)^{-1} H^H y when the condition number exceeds 1e8.
inline Vec2 equalize_2x2(const Mat2& h, const Vec2& y) {
  // Gram matrix G = H^H H.
  const double g00 = std::norm(h[0][0]) + std::norm(h[1][0]);
  const double g11 = std::norm(h[0][1]) + std::norm(h[1][1]);
  const cplx g01 = std::conj(h[0][0]) * h[0][1] + std::conj(h[1][0]) * h[1][1];
  const double tr = g00 + g11;
  const double det_g = g00 * g11 - std::norm(g01);
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det_g));
  const double lmax = tr / 2.0 + disc;
  const double lmin = tr / 2.0 - disc;
  // cond(H)^2 = lmax / lmin; compare against 1e16 to avoid the square root.
  const bool well_conditioned = lmin > 0.0 && lmax <= 1e16 * lmin;

  if (well_conditioned) {
    const cplx det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    return {(h[1][1] * y[0] - h[0][1] * y[1]) / det, (h[0][0] * y[1] - h[1][0] * y[0]) / det};
  }
  const double eps = 1e-8;
  const cplx z0 = std::conj(h[0][0]) * y[0] + std::conj(h[1][0]) * y[1];
  const cplx z1 = std::conj(h[0][1]) * y[0] + std::conj(h[1][1]) * y[1];
  const double a = g00 + eps, d = g11 + eps;
  const double det = a * d - std::norm(g01);
  return {(d * z0 - g01 * z1) / det, (a * z1 - std::conj(g01) * z0) / det};
}

/// Maximal-ratio combining of one stream over two receive antennas.
inline cplx combine_mrc(const Vec2& h, const Vec2& y) {
  const double energy = std::norm(h[0]) + std::norm(h[1]);
  if (!(energy > 0.0)) return 0.0;
  return (std::conj(h[0]) * y[0] + std::conj(h[1]) * y[1]) / energy;
}

// ---------------------------------------------------------------------------
// Scenario description

/// Textual channel description: exp:beta,L | tdla:ds_ns | tdlc:ds_ns | equal:max_us | silent.
struct ChannelSpec {
  std::string text = "silent";

  static ChannelSpec parse(std::string_view s) {
    ChannelSpec spec{std::string(s)};
    (void)spec.build(GridSpec::uniform(2048, 120));  // syntax check only
    return spec;
  }

  /// Profile for this spec; nullopt for a silent port.
  std::optional<PowerDelayProfile> build(const GridSpec& grid) const {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    auto number = [&](const std::string& v) {
      try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
      } catch (const std::exception&) {
        throw ConfigError("channel '" + text + "': cannot parse number '" + v + "'");
      }
    };
    if (kind == "silent") {
      if (!args.empty()) throw ConfigError("channel 'silent' takes no arguments");
      return std::nullopt;
    }
    if (args.empty()) throw ConfigError("channel '" + text + "' is missing its arguments");
    if (kind == "exp") {
      const auto comma = args.find(',');
      if (comma == std::string::npos) throw ConfigError("channel '" + text + "': expected exp:beta,L");
      const double beta = number(args.substr(0, comma));
      const double taps = number(args.substr(comma + 1));
      if (taps < 1 || taps != std::floor(taps)) throw ConfigError("channel '" + text + "': L must be a positive integer");
      return exp_pdp(beta, static_cast<std::size_t>(taps));
    }
    if (kind == "tdla" || kind == "tdlc")
      return tdl_pdp(kind == "tdla" ? TdlProfile::A : TdlProfile::C, number(args) * 1e-9, grid.sample_rate);
    if (kind == "equal") return equal_pdp(number(args) * 1e-6, grid.sample_rate);
    throw ConfigError("unknown channel model '" + kind + "'");
  }
};

struct ScenarioConfig {
  GridSpec grid = GridSpec::uniform(2048, 120);
  PowerDelayProfile pdp_port1 = exp_pdp(-0.0005, 40);
  std::optional<PowerDelayProfile> pdp_port2 = exp_pdp(-0.05, 40);
  std::vector<Estimator> estimators{Estimator::Dft, Estimator::Occ, Estimator::FMmse, Estimator::PMmse};
  std::vector<double> snr_db{0.0, 10.0, 20.0, 30.0};
  std::size_t trials = 10000;
  std::size_t data_symbols_per_slot = 6;
  std::uint64_t master_seed = 1;
  std::size_t workers = 1;
  std::optional<std::size_t> delta_cs;  // default P/2
  OccNoise occ_noise = OccNoise::Halved;

  void validate() const {
    grid.validate();
    if (trials == 0) throw ConfigError("trials must be at least 1");
    if (snr_db.empty()) throw ConfigError("SNR list is empty");
    if (estimators.empty()) throw ConfigError("estimator list is empty");
    for (double s : snr_db)
      if (!std::isfinite(s)) throw ConfigError("SNR values must be finite");
    if (pdp_port1.max_delay() >= grid.M || (pdp_port2 && pdp_port2->max_delay() >= grid.M))
      throw ConfigError("channel delay exceeds the M-point grid");
  }

  std::size_t active_ports() const noexcept { return pdp_port2 ? 2 : 1; }
};

/// Per-receive-antenna pilot SNR 1/sigma2.
inline double noise_variance(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

// ---------------------------------------------------------------------------
// Report

struct SweepRow {
  double snr_db = 0.0;
  std::string estimator;
  double empirical_mse = std::numeric_limits<double>::quiet_NaN();  // total over the P pilots
  double analytic_mse = std::numeric_limits<double>::quiet_NaN();
  double ber = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t bits_counted = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::string error;  // non-empty for a failed row

  bool failed() const noexcept { return !error.empty(); }
  double empirical_mse_per_subcarrier(std::size_t P) const { return empirical_mse / static_cast<double>(P); }
};

struct SweepReport {
  std::vector<SweepRow> rows;

  void sort() {
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
      return std::tie(a.snr_db, a.estimator) < std::tie(b.snr_db, b.estimator);
    });
  }

  const SweepRow* find(double snr_db, std::string_view estimator) const {
    for (const auto& r : rows)
      if (r.snr_db == snr_db && r.estimator == estimator) return &r;
    return nullptr;
  }

  const SweepRow& at(double snr_db, std::string_view estimator) const {
    if (const auto* r = find(snr_db, estimator)) return *r;
    throw Error("report has no row for " + std::string(estimator) + " at " + std::to_string(snr_db) + " dB");
  }
};

inline constexpr std::string_view kReportHeader = "snr_db,estimator,empirical_mse,analytic_mse,ber,bits_counted,trials,seed";

namespace detail {

inline std::string format_g9(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace detail

/// CSV text, rows sorted by (snr_db, estimator), floats with 9 significant digits.
inline std::string format_report(SweepReport report) {
  report.sort();
  std::ostringstream os;
  os << kReportHeader << '\n';
  for (const auto& r : report.rows) {
    os << detail::format_g9(r.snr_db) << ',' << r.estimator << ',' << detail::format_g9(r.empirical_mse) << ','
       << detail::format_g9(r.analytic_mse) << ',' << detail::format_g9(r.ber) << ',' << r.bits_counted << ','
       << r.trials << ',' << r.seed << '\n';
  }
  return os.str();
}

inline void write_report(const SweepReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << format_report(report);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline SweepReport parse_report(std::istream& in, const std::string& source = "<stream>") {
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader) throw IoError("'" + source + "': missing or unexpected CSV header");
  SweepReport report;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 8) throw IoError("'" + source + "' line " + std::to_string(lineno) + ": expected 8 fields");
    try {
      SweepRow r;
      r.snr_db = std::stod(f[0]);
      r.estimator = f[1];
      r.empirical_mse = std::stod(f[2]);
      r.analytic_mse = std::stod(f[3]);
      r.ber = std::stod(f[4]);
      r.bits_counted = std::stoull(f[5]);
      r.trials = std::stoull(f[6]);
      r.seed = std::stoull(f[7]);
      report.rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw IoError("'" + source + "' line " + std::to_string(lineno) + ": malformed number");
    }
  }
  return report;
}

inline SweepReport read_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return parse_report(in, path);
}

// ---------------------------------------------------------------------------
// Sweep engine

namespace detail {

inline constexpr std::size_t kTrialsPerBlock = 32;
inline constexpr std::uint64_t kPilotStreamKey = 0xD3A5'0000'0000'0001ULL;

/// Everything that is fixed for a sweep: pilots, priors and per-SNR filters.
struct SweepPlan {
  const ScenarioConfig& cfg;
  PilotGrid pg;
  ResponseMap map1;
  std::optional<ResponseMap> map2;
  ComplexMatrix r1;
  std::optional<ComplexMatrix> r2;
  std::vector<double> sigma2;
  // Indexed [snr * estimators + estimator].
  std::vector<std::optional<LinearEstimator>> filters;
  std::vector<std::string> errors;
  std::vector<std::array<double, 2>> analytic;

  explicit SweepPlan(const ScenarioConfig& c)
      : cfg(c), pg(make_pilots(c)), map1(c.pdp_port1, c.grid), r1(covariance(c.pdp_port1, c.grid)) {
    if (c.pdp_port2) {
      map2.emplace(*c.pdp_port2, c.grid);
      r2 = covariance(*c.pdp_port2, c.grid);
    }
    const std::size_t ne = c.estimators.size();
    filters.resize(c.snr_db.size() * ne);
    errors.resize(filters.size());
    analytic.assign(filters.size(), {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()});
    for (std::size_t s = 0; s < c.snr_db.size(); ++s) {
      sigma2.push_back(noise_variance(c.snr_db[s]));
      for (std::size_t e = 0; e < ne; ++e) {
        const std::size_t idx = s * ne + e;
        const Estimator kind = c.estimators[e];
        if (kind == Estimator::Perfect) continue;
        try {
          filters[idx] = LinearEstimator::make(kind, pg, r1, r2, sigma2[s], c.occ_noise);
          analytic[idx] = analytic_for(kind, sigma2[s]);
        } catch (const Error& ex) {
          errors[idx] = ex.what();
        }
      }
    }
  }

  static PilotGrid make_pilots(const ScenarioConfig& c) {
    RngStream stream = RngStream(c.master_seed).split(kPilotStreamKey);
    auto x = gen_pilots(c.grid.P, stream);
    return PilotGrid::make(c.grid, std::move(x), c.delta_cs);
  }

  std::size_t ports() const noexcept { return r2 ? 2 : 1; }

  /// Closed-form per-port MSE for the MMSE family; NaN elsewhere.
  std::array<double, 2> analytic_for(Estimator kind, double s2) const {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    const ComplexMatrix zero(r1.rows(), r1.cols());
    const ComplexMatrix& true_r2 = r2 ? *r2 : zero;
    const CVector ramp2 = detail::conj_ramp(pg.c);
    std::array<double, 2> out{nan, nan};
    switch (kind) {
      case Estimator::FMmse:
        out[0] = analytic_mse_f(r1, true_r2, pg.c, s2);
        if (r2) out[1] = analytic_mse_f(*r2, r1, ramp2, s2);
        break;
      case Estimator::PMmse:
        out[0] = analytic_mse_p(r1, true_r2, pg.c, s2);
        if (r2) out[1] = analytic_mse_p(*r2, r1, ramp2, s2);
        break;
      case Estimator::SinglePortMmse:
        out[0] = analytic_mse(mmse_filter(r1, nullptr, {}, s2), r1, &true_r2, pg.c, s2);
        if (r2) out[1] = analytic_mse(mmse_filter(*r2, nullptr, {}, s2), *r2, &r1, ramp2, s2);
        break;
      default:
        break;
    }
    return out;
  }
};

/// Sums over trials, indexed [(snr * estimators + estimator) * 2 + port].
struct Accumulator {
  std::vector<double> sq_err;
  std::vector<std::uint64_t> mse_samples;
  std::vector<std::uint64_t> bit_errors;
  std::vector<std::uint64_t> bits;

  explicit Accumulator(std::size_t cells = 0)
      : sq_err(2 * cells, 0.0), mse_samples(2 * cells, 0), bit_errors(2 * cells, 0), bits(2 * cells, 0) {}

  void add(const Accumulator& o) {
    for (std::size_t i = 0; i < sq_err.size(); ++i) {
      sq_err[i] += o.sq_err[i];
      mse_samples[i] += o.mse_samples[i];
      bit_errors[i] += o.bit_errors[i];
      bits[i] += o.bits[i];
    }
  }
};

inline std::uint64_t count_errors(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i];
  return n;
}

inline void run_trial(const SweepPlan& plan, std::size_t trial, bool with_ber, Accumulator& acc) {
  const ScenarioConfig& cfg = plan.cfg;
  const std::size_t P = cfg.grid.P;
  const std::size_t ne = cfg.estimators.size();
  const bool two_ports = plan.ports() == 2;
  const RngStream root = RngStream(cfg.master_seed).split(trial);

  const auto chan = ChannelRealization::draw(cfg.pdp_port1, cfg.pdp_port2, root.split(1));
  std::array<std::array<CVector, 2>, 2> h;  // [port][rx]
  for (std::size_t r = 0; r < 2; ++r) {
    h[0][r] = plan.map1(chan.taps[0][r]);
    h[1][r] = two_ports ? (*plan.map2)(chan.taps[1][r]) : CVector(P);
  }

  // Data slot: both ports send D QPSK vectors on the pilot subcarriers.
  const std::size_t D = with_ber ? cfg.data_symbols_per_slot : 0;
  std::array<Bits, 2> tx_bits;
  std::array<CVector, 2> tx_sym;
  std::array<CVector, 2> data_noise;
  if (with_ber) {
    RngStream bit_stream = root.split(3);
    for (std::size_t t = 0; t < plan.ports(); ++t) {
      tx_bits[t].resize(2 * D * P);
      for (auto& b : tx_bits[t]) b = bit_stream.bit();
      tx_sym[t] = qpsk_mod(tx_bits[t]);
    }
    for (std::size_t r = 0; r < 2; ++r) {
      RngStream ns = root.split(20 + r);
      data_noise[r] = crandn(D * P, ns);
    }
  }

  std::array<LsObservation, 2> obs;
  std::array<PortEstimates, 2> est;

  for (std::size_t s = 0; s < cfg.snr_db.size(); ++s) {
    const double s2 = plan.sigma2[s];
    for (std::size_t r = 0; r < 2; ++r) {
      RngStream ns = root.split(10 + r);
      const CVector y = received_pilots(h[0][r], two_ports ? std::span<const cplx>(h[1][r]) : std::span<const cplx>{},
                                        plan.pg, s2, ns);
      obs[r] = ls_decouple(y, plan.pg, s2);
    }

    for (std::size_t e = 0; e < ne; ++e) {
      const std::size_t cell = s * ne + e;
      const Estimator kind = cfg.estimators[e];
      if (!plan.errors[cell].empty()) continue;
      for (std::size_t r = 0; r < 2; ++r)
        est[r] = kind == Estimator::Perfect ? PortEstimates{h[0][r], h[1][r], kind} : plan.filters[cell]->apply(obs[r]);

      for (std::size_t r = 0; r < 2; ++r) {
        acc.sq_err[2 * cell] += squared_distance(h[0][r], est[r].h1_hat);
        acc.mse_samples[2 * cell] += 1;
        if (two_ports) {
          acc.sq_err[2 * cell + 1] += squared_distance(h[1][r], est[r].h2_hat);
          acc.mse_samples[2 * cell + 1] += 1;
        }
      }
      if (!with_ber) continue;

      const double sigma = std::sqrt(s2);
      std::array<CVector, 2> decided{CVector(D * P), CVector(D * P)};
      for (std::size_t d = 0; d < D; ++d)
        for (std::size_t p = 0; p < P; ++p) {
          const std::size_t i = d * P + p;
          Vec2 y;
          for (std::size_t r = 0; r < 2; ++r) {
            cplx v = h[0][r][p] * tx_sym[0][i] + sigma * data_noise[r][i];
            if (two_ports) v += h[1][r][p] * tx_sym[1][i];
            y[r] = v;
          }
          if (two_ports) {
            const Mat2 hest{{{est[0].h1_hat[p], est[0].h2_hat[p]}, {est[1].h1_hat[p], est[1].h2_hat[p]}}};
            const Vec2 shat = equalize_2x2(hest, y);
            decided[0][i] = shat[0];
            decided[1][i] = shat[1];
          } else {
            decided[0][i] = combine_mrc({est[0].h1_hat[p], est[1].h1_hat[p]}, y);
          }
        }
      for (std::size_t t = 0; t < plan.ports(); ++t) {
        const Bits rx_bits = qpsk_demod(decided[t]);
        acc.bit_errors[2 * cell + t] += count_errors(tx_bits[t], rx_bits);
        acc.bits[2 * cell + t] += rx_bits.size();
      }
    }
  }
}

inline SweepReport run_sweep(const ScenarioConfig& cfg, bool with_ber) {
  cfg.validate();
  const SweepPlan plan(cfg);
  const std::size_t ne = cfg.estimators.size();
  const std::size_t cells = cfg.snr_db.size() * ne;
  const std::size_t blocks = (cfg.trials + kTrialsPerBlock - 1) / kTrialsPerBlock;

  std::vector<Accumulator> block_acc(blocks, Accumulator(cells));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b = next++; b < blocks; b = next++) {
      const std::size_t end = std::min(cfg.trials, (b + 1) * kTrialsPerBlock);
      for (std::size_t t = b * kTrialsPerBlock; t < end; ++t) run_trial(plan, t, with_ber, block_acc[b]);
    }
  };
  const std::size_t nthreads = std::max<std::size_t>(1, std::min(cfg.workers, blocks));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  }

  Accumulator total(cells);
  for (const auto& a : block_acc) total.add(a);

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  SweepReport report;
  const std::size_t ports = plan.ports();
  for (std::size_t s = 0; s < cfg.snr_db.size(); ++s)
    for (std::size_t e = 0; e < ne; ++e) {
      const std::size_t cell = s * ne + e;
      const std::string name(to_string(cfg.estimators[e]));
      SweepRow base;
      base.snr_db = cfg.snr_db[s];
      base.seed = cfg.master_seed;
      if (!plan.errors[cell].empty()) {
        base.estimator = name;
        base.error = plan.errors[cell];
        report.rows.push_back(base);
        continue;
      }
      base.trials = cfg.trials;

      auto make_row = [&](std::string label, std::size_t first, std::size_t count) {
        SweepRow row = base;
        row.estimator = std::move(label);
        double sq = 0.0, an = 0.0;
        std::uint64_t n = 0, errs = 0, bits = 0;
        for (std::size_t t = first; t < first + count; ++t) {
          sq += total.sq_err[2 * cell + t];
          n += total.mse_samples[2 * cell + t];
          an += plan.analytic[cell][t];
          errs += total.bit_errors[2 * cell + t];
          bits += total.bits[2 * cell + t];
        }
        row.empirical_mse = sq / static_cast<double>(n);
        row.analytic_mse = an / static_cast<double>(count);
        if (with_ber) {
          row.ber = static_cast<double>(errs) / static_cast<double>(bits);
          row.bits_counted = bits;
        } else {
          row.ber = nan;
        }
        return row;
      };

      report.rows.push_back(make_row(name, 0, ports));
      if (ports == 2) {
        report.rows.push_back(make_row(name + ":port1", 0, 1));
        report.rows.push_back(make_row(name + ":port2", 1, 1));
      }
    }
  report.sort();
  return report;
}

}  // namespace detail

/// Empirical MSE ||h - hhat||^2 per (SNR, estimator), averaged over trials,
/// receive antennas and active ports, with the closed-form value attached for
/// the MMSE estimators. Two-port scenarios add per-port rows "<name>:port1/2".
inline SweepReport run_mse_sweep(const ScenarioConfig& cfg) { return detail::run_sweep(cfg, false); }

/// Uncoded QPSK BER with per-subcarrier 2 x 2 zero forcing (or 1 x 2 MRC when
/// port 2 is silent) using the estimated channels. Also fills the MSE columns.
inline SweepReport run_ber_sweep(const ScenarioConfig& cfg) { return detail::run_sweep(cfg, true); }

/// One channel realization (port 1, receive antenna 0) with every requested
/// estimate of it, for magnitude-response plots.
struct ChannelSnapshot {
  std::vector<std::size_t> subcarriers;
  CVector truth;
  std::vector<std::pair<std::string, CVector>> estimates;
};

inline ChannelSnapshot snapshot_channel(ScenarioConfig cfg, double snr_db, std::size_t trial = 0) {
  cfg.snr_db = {snr_db};
  cfg.validate();
  const detail::SweepPlan plan(cfg);
  const RngStream root = RngStream(cfg.master_seed).split(trial);
  const auto chan = ChannelRealization::draw(cfg.pdp_port1, cfg.pdp_port2, root.split(1));
  const CVector h1 = plan.map1(chan.taps[0][0]);
  const CVector h2 = plan.map2 ? (*plan.map2)(chan.taps[1][0]) : CVector{};
  RngStream ns = root.split(10);
  const LsObservation obs = ls_decouple(received_pilots(h1, h2, plan.pg, plan.sigma2[0], ns), plan.pg, plan.sigma2[0]);

  ChannelSnapshot snap{cfg.grid.pilot_indices, h1, {}};
  for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
    const Estimator kind = cfg.estimators[e];
    if (!plan.errors[e].empty()) throw UnsupportedConfig(std::string(to_string(kind)) + ": " + plan.errors[e]);
    snap.estimates.emplace_back(std::string(to_string(kind)), kind == Estimator::Perfect ? h1 : plan.filters[e]->apply(obs).h1_hat);
  }
  return snap;
}

/// Trials needed for at least `bits` counted bits per BER point.
inline std::size_t trials_for_bits(const ScenarioConfig& cfg, std::uint64_t bits) {
  const std::uint64_t per_trial = 2ULL * cfg.grid.P * cfg.data_symbols_per_slot * cfg.active_ports();
  if (per_trial == 0) throw ConfigError("data_symbols_per_slot must be positive for a BER sweep");
  return static_cast<std::size_t>((bits + per_trial - 1) / per_trial);
}

}  // namespace estlab
