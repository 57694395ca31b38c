// SPDX-License-Identifier: Apache-2.0
//
// estlab: command-line front end for the two-port DMRS estimator sweeps.
//
//   estlab mse|ber|phi|dump-channel [--config FILE] [--snr LIST] [--trials N]
//          [--estimators LIST] [--channel1 SPEC] [--channel2 SPEC] [--seed N]
//          [--out FILE] ...
//
// Exit codes: 0 success, 1 configuration error, 2 runtime/numerical error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "estlab/estlab.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Flag {
  std::string key;
  std::string name;
  std::string help;
  std::string value;
};

std::vector<Flag> make_flags() {
  return {
      {"snr", "--snr", "Comma-separated SNR list in dB", {}},
      {"trials", "--trials", "Monte-Carlo trials per SNR point", {}},
      {"estimators", "--estimators", "Comma list of dft,occ,fmmse,pmmse,spmmse,perfect", {}},
      {"channel1", "--channel1", "exp:beta,L | tdla:ds_ns | tdlc:ds_ns | equal:max_us", {}},
      {"channel2", "--channel2", "Same syntax as --channel1, or silent", {}},
      {"seed", "--seed", "64-bit master seed", {}},
      {"out", "--out", "Output path (stdout when omitted)", {}},
      {"M", "--subcarriers", "Total subcarriers M", {}},
      {"P", "--pilots", "Pilot count P", {}},
      {"data_symbols", "--data-symbols", "QPSK data symbols per slot (BER sweeps)", {}},
      {"workers", "--workers", "Worker threads (results do not depend on it)", {}},
      {"delta_cs", "--delta-cs", "Cyclic shift of port 2 (default P/2)", {}},
      {"occ_noise", "--occ-noise", "OCC Wiener noise variance: halved | literal", {}},
  };
}

struct Invocation {
  std::string config_path;
  std::vector<Flag> flags = make_flags();
  bool print_pdp = false;
};

void add_common_options(CLI::App& sub, Invocation& inv) {
  sub.add_option("--config", inv.config_path, "Scenario file with key = value lines");
  for (auto& f : inv.flags) sub.add_option(f.name, f.value, f.help);
}

estlab::Settings collect_settings(const CLI::App& sub, const Invocation& inv) {
  estlab::Settings s;
  if (!inv.config_path.empty()) s = estlab::read_settings(inv.config_path);
  for (const auto& f : inv.flags)
    if (sub.count(f.name) > 0) s[f.key] = f.value;
  return s;
}

std::string output_path(const estlab::Settings& s) {
  auto it = s.find("out");
  return it == s.end() ? std::string{} : it->second;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw estlab::IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw estlab::IoError("write to '" + path + "' failed");
}

void warn_failed_rows(const estlab::SweepReport& report) {
  for (const auto& r : report.rows)
    if (r.failed()) std::cerr << "warning: " << r.estimator << " at " << r.snr_db << " dB failed: " << r.error << '\n';
}

double first_snr_or(const estlab::Settings& s, double fallback) {
  auto it = s.find("snr");
  return it == s.end() ? fallback : estlab::parse_snr_list(it->second).front();
}

int run_sweep(const estlab::Settings& settings, bool ber) {
  estlab::ScenarioConfig cfg = estlab::scenario_from_settings(settings);
  if (ber && settings.find("trials") == settings.end()) cfg.trials = estlab::trials_for_bits(cfg, 1'000'000);
  const auto report = ber ? estlab::run_ber_sweep(cfg) : estlab::run_mse_sweep(cfg);
  warn_failed_rows(report);
  const std::string path = output_path(settings);
  if (path.empty())
    std::cout << estlab::format_report(report);
  else
    estlab::write_report(report, path);
  return 0;
}

int run_phi(const estlab::Settings& settings) {
  const estlab::ScenarioConfig cfg = estlab::scenario_from_settings(settings);
  if (!cfg.pdp_port2) throw estlab::ConfigError("phi needs an active second port");
  const double snr = first_snr_or(settings, 30.0);
  const double s2 = estlab::noise_variance(snr);
  const auto r1 = estlab::covariance(cfg.pdp_port1, cfg.grid);
  const auto r2 = estlab::covariance(*cfg.pdp_port2, cfg.grid);
  const auto c = estlab::cyclic_shift_phasors(cfg.grid.P, cfg.delta_cs.value_or(cfg.grid.P / 2));

  std::ostringstream os;
  os.precision(9);
  auto block = [&](const char* name, const estlab::ComplexMatrix& den2) {
    const auto mags = estlab::diag_magnitudes(estlab::build_phi(r1, den2, c, s2));
    os << "# " << name << " |diag Phi| at SNR " << snr << " dB\n";
    for (std::size_t p = 0; p < mags.size(); ++p) os << p << ' ' << mags[p] << '\n';
  };
  block("pmmse", r1);
  os << '\n';
  block("fmmse", r2);
  emit(os.str(), output_path(settings));
  return 0;
}

int run_dump_channel(const estlab::Settings& settings, bool print_pdp) {
  const estlab::ScenarioConfig cfg = estlab::scenario_from_settings(settings);
  if (print_pdp) {
    std::string text = estlab::to_text(cfg.pdp_port1);
    if (cfg.pdp_port2) text += "\n" + estlab::to_text(*cfg.pdp_port2);
    emit(text, output_path(settings));
    return 0;
  }
  const double snr = first_snr_or(settings, 30.0);
  const auto snap = estlab::snapshot_channel(cfg, snr);
  std::ostringstream os;
  os.precision(9);
  os << "# subcarrier |h|";
  for (const auto& [name, v] : snap.estimates) os << " |" << name << "|";
  os << "  (port 1, rx 0, SNR " << snr << " dB)\n";
  for (std::size_t p = 0; p < snap.truth.size(); ++p) {
    os << snap.subcarriers[p] << ' ' << std::abs(snap.truth[p]);
    for (const auto& [name, v] : snap.estimates) os << ' ' << std::abs(v[p]);
    os << '\n';
  }
  emit(os.str(), output_path(settings));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Channel estimation lab for two-port Type-2 DMRS"};
  app.require_subcommand(1);

  Invocation mse_inv, ber_inv, phi_inv, dump_inv;
  auto* mse = app.add_subcommand("mse", "Monte-Carlo MSE sweep (CSV)");
  auto* ber = app.add_subcommand("ber", "Monte-Carlo uncoded QPSK BER sweep (CSV)");
  auto* phi = app.add_subcommand("phi", "Diagonal magnitudes of the P-MMSE and F-MMSE coefficient matrices");
  auto* dump = app.add_subcommand("dump-channel", "Magnitude response of one channel and its estimates");
  add_common_options(*mse, mse_inv);
  add_common_options(*ber, ber_inv);
  add_common_options(*phi, phi_inv);
  add_common_options(*dump, dump_inv);
  dump->add_flag("--pdp", dump_inv.print_pdp, "Print the power delay profiles instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (mse->parsed()) return run_sweep(collect_settings(*mse, mse_inv), false);
    if (ber->parsed()) return run_sweep(collect_settings(*ber, ber_inv), true);
    if (phi->parsed()) return run_phi(collect_settings(*phi, phi_inv));
    if (dump->parsed()) return run_dump_channel(collect_settings(*dump, dump_inv), dump_inv.print_pdp);
  } catch (const estlab::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const estlab::InvalidDimension& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
