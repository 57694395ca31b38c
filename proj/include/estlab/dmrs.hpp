// SPDX-License-Identifier: Apache-2.0
//
// Two-port Type-2 DMRS on the pilot grid. Port 2 reuses the port-1 pilots with a
// cyclic-shift phase ramp c_p = exp(j 2 pi p dcs / P); odd subcarriers of the
// allocation carry nothing and never enter the estimators.

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>

#include "estlab/channel.hpp"
#include "estlab/errors.hpp"
#include "estlab/numerics.hpp"

namespace estlab {

/// Phase ramp exp(j 2 pi p dcs / P). Quarter turns are emitted exactly.
inline CVector cyclic_shift_phasors(std::size_t P, std::size_t delta_cs) {
  if (P == 0) throw InvalidDimension("cyclic shift needs P >= 1");
  CVector c(P);
  for (std::size_t p = 0; p < P; ++p) {
    const std::size_t k = (p * delta_cs) % P;
    if (k == 0)
      c[p] = 1.0;
    else if (2 * k == P)
      c[p] = -1.0;
    else if (4 * k == P)
      c[p] = cplx(0.0, 1.0);
    else if (4 * k == 3 * P)
      c[p] = cplx(0.0, -1.0);
    else
      c[p] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(P));
  }
  return c;
}

/// Pseudo-random unit-modulus QPSK pilot sequence.
inline CVector gen_pilots(std::size_t P, RngStream& stream) {
  if (P < 2 || P % 2 != 0) throw ConfigError("gen_pilots: P must be even and at least 2");
  const double a = std::numbers::sqrt2 / 2.0;
  CVector x(P);
  for (auto& v : x) {
    const double re = stream.bit() ? -a : a;
    const double im = stream.bit() ? -a : a;
    v = {re, im};
  }
  return x;
}

struct PilotGrid {
  GridSpec grid;
  CVector x;
  std::size_t delta_cs = 0;
  CVector c;
  std::size_t symbol_index = 2;  // bookkeeping only

  std::size_t P() const noexcept { return grid.P; }

  static PilotGrid make(GridSpec grid, CVector pilots, std::optional<std::size_t> delta_cs = std::nullopt) {
    grid.validate();
    if (pilots.size() != grid.P) throw ShapeError("pilot grid: pilot sequence length differs from P");
    PilotGrid pg;
    pg.delta_cs = delta_cs.value_or(grid.P / 2);
    pg.c = cyclic_shift_phasors(grid.P, pg.delta_cs);
    pg.grid = std::move(grid);
    pg.x = std::move(pilots);
    return pg;
  }

  static PilotGrid make(GridSpec grid, RngStream& stream) {
    auto x = gen_pilots(grid.P, stream);
    return make(std::move(grid), std::move(x));
  }

  bool half_shift() const noexcept { return grid.P % 2 == 0 && 2 * delta_cs == grid.P; }
};

/// y_p = x_p h1_p + x_p c_p h2_p + eta_p, eta ~ CN(0, sigma2). An empty h2 means port 2 is silent.
inline CVector received_pilots(std::span<const cplx> h1, std::span<const cplx> h2, const PilotGrid& pg, double sigma2,
                               RngStream& stream) {
  const std::size_t P = pg.P();
  if (h1.size() != P || (!h2.empty() && h2.size() != P)) throw ShapeError("received_pilots: channel length differs from P");
  if (sigma2 < 0.0) throw ConfigError("received_pilots: noise variance must be non-negative");
  const double sigma = std::sqrt(sigma2);
  CVector y(P);
  for (std::size_t p = 0; p < P; ++p) {
    cplx s = h1[p];
    if (!h2.empty()) s += pg.c[p] * h2[p];
    y[p] = pg.x[p] * s + sigma * stream.cnormal();
  }
  return y;
}

struct LsObservation {
  CVector hhat;
  double sigma2 = 0.0;
};

/// hhat = X^{-1} y.
inline LsObservation ls_decouple(std::span<const cplx> y, const PilotGrid& pg, double sigma2 = 0.0) {
  if (y.size() != pg.P()) throw ShapeError("ls_decouple: observation length differs from P");
  LsObservation obs{CVector(y.size()), sigma2};
  for (std::size_t p = 0; p < y.size(); ++p) {
    if (std::abs(std::abs(pg.x[p]) - 1.0) > 1e-9) throw InvalidPilot("ls_decouple: pilot " + std::to_string(p) + " is not unit modulus");
    obs.hhat[p] = y[p] / pg.x[p];
  }
  return obs;
}

}  // namespace estlab
