// SPDX-License-Identifier: Apache-2.0
//
// Channel estimators for the superposed two-port observation
//   hhat = h1 + C h2 + n,   n ~ CN(0, sigma2 I).
//
// Each estimator is offered twice: as a direct routine that follows the
// algorithm step by step, and as a LinearEstimator whose P x P matrices are
// built once per (priors, sigma2) and reused across Monte-Carlo trials.

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "estlab/channel.hpp"
#include "estlab/dmrs.hpp"
#include "estlab/errors.hpp"
#include "estlab/numerics.hpp"

namespace estlab {

enum class Estimator { Dft, Occ, FMmse, PMmse, SinglePortMmse, Perfect };

inline constexpr std::array<Estimator, 6> kAllEstimators{Estimator::Dft,   Estimator::Occ,
                                                         Estimator::FMmse, Estimator::PMmse,
                                                         Estimator::SinglePortMmse, Estimator::Perfect};

inline std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::Dft: return "dft";
    case Estimator::Occ: return "occ";
    case Estimator::FMmse: return "fmmse";
    case Estimator::PMmse: return "pmmse";
    case Estimator::SinglePortMmse: return "spmmse";
    case Estimator::Perfect: return "perfect";
  }
  return "?";
}

inline Estimator parse_estimator(std::string_view name) {
  for (auto e : kAllEstimators)
    if (to_string(e) == name) return e;
  throw ConfigError("unknown estimator '" + std::string(name) + "'");
}

/// Noise variance used by the OCC Wiener stage. Pairwise averaging halves the
/// per-entry noise variance; `Literal` keeps the undivided sigma2.
enum class OccNoise { Halved, Literal };

struct CovarianceSet {
  ComplexMatrix R1;
  std::optional<ComplexMatrix> R2;
  double sigma2 = 0.0;
};

struct PortEstimates {
  CVector h1_hat;
  CVector h2_hat;
  Estimator estimator = Estimator::Dft;
};

// ---------------------------------------------------------------------------
// MMSE family

namespace detail {

/// K = own + diag(c) other diag(c)^H + sigma2 I.
inline ComplexMatrix observation_covariance(const ComplexMatrix& own, const ComplexMatrix* other,
                                            std::span<const cplx> c, double sigma2) {
  if (!own.square()) throw ShapeError("covariance must be square");
  if (sigma2 < 0.0) throw ConfigError("noise variance must be non-negative");
  ComplexMatrix k = own;
  if (other != nullptr) {
    if (other->rows() != own.rows() || other->cols() != own.cols()) throw ShapeError("covariances differ in size");
    k += diag_sandwich(c, *other, c);
  }
  for (std::size_t i = 0; i < k.rows(); ++i) k(i, i) += sigma2;
  return k;
}

inline CVector conj_ramp(std::span<const cplx> c) {
  CVector out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = std::conj(c[i]);
  return out;
}

inline CVector rotate(std::span<const cplx> v, std::span<const cplx> ramp) {
  CVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = ramp[i] * v[i];
  return out;
}

}  // namespace detail

/// W = own (own + C other C^H + sigma2 I)^{-1}. Passing `other == nullptr`
/// gives the single-port filter.
inline ComplexMatrix mmse_filter(const ComplexMatrix& own, const ComplexMatrix* other, std::span<const cplx> c,
                                 double sigma2) {
  const Cholesky k(detail::observation_covariance(own, other, c, sigma2));
  // own and K are Hermitian, so own K^{-1} = (K^{-1} own)^H.
  return k.solve(own).adjoint();
}

/// own (own + C other C^H + sigma2 I)^{-1} hhat, via one PD solve.
inline CVector apply_mmse(std::span<const cplx> hhat, const ComplexMatrix& own, const ComplexMatrix* other,
                          std::span<const cplx> c, double sigma2) {
  const Cholesky k(detail::observation_covariance(own, other, c, sigma2));
  return own * k.solve(hhat);
}

/// Port-1 estimate with both priors known.
inline CVector f_mmse(const LsObservation& obs, const CovarianceSet& cov, const PilotGrid& pg) {
  if (!cov.R2) throw ConfigError("f_mmse needs the port-2 covariance");
  return apply_mmse(obs.hhat, cov.R1, &*cov.R2, pg.c, cov.sigma2);
}

/// Port-2 counterpart of f_mmse: the observation is pre-rotated by C^H so that
/// port 2 is the unshifted port, then the roles of R1 and R2 swap.
inline CVector f_mmse_port2(const LsObservation& obs, const CovarianceSet& cov, const PilotGrid& pg) {
  if (!cov.R2) throw ConfigError("f_mmse needs the port-2 covariance");
  const CVector ramp = detail::conj_ramp(pg.c);
  return apply_mmse(detail::rotate(obs.hhat, ramp), *cov.R2, &cov.R1, ramp, cov.sigma2);
}

/// Port-1 estimate using only the port-1 prior; R1 stands in for the unknown R2.
inline CVector p_mmse(const LsObservation& obs, const CovarianceSet& cov, const PilotGrid& pg) {
  return apply_mmse(obs.hhat, cov.R1, &cov.R1, pg.c, cov.sigma2);
}

/// Optimal estimate when port 2 carries nothing.
inline CVector single_port_mmse(const LsObservation& obs, const ComplexMatrix& r1, double sigma2) {
  return apply_mmse(obs.hhat, r1, nullptr, {}, sigma2);
}

// ---------------------------------------------------------------------------
// DFT-based separation

namespace detail {

inline void require_even(std::size_t P) {
  if (P % 2 != 0) throw ConfigError("DFT estimator needs an even pilot count");
}

}  // namespace detail

/// IDFT to the time domain, keep [0, P/2) for port 1 and [P/2, P) for port 2,
/// rotate port 2 back by P/2 and transform both with the forward DFT.
inline PortEstimates dft_estimate(const LsObservation& obs, const PilotGrid& pg) {
  const std::size_t P = pg.P();
  detail::require_even(P);
  if (obs.hhat.size() != P) throw ShapeError("dft_estimate: observation length differs from P");
  const ComplexMatrix f = idft_matrix(P);
  const ComplexMatrix fh = f.adjoint();
  const CVector u = f * obs.hhat;
  const std::size_t half = P / 2;

  CVector port1(P), port2(P);
  for (std::size_t k = 0; k < half; ++k) {
    port1[k] = u[k];
    port2[k] = u[k + half];
  }
  return {fh * port1, fh * port2, Estimator::Dft};
}

/// The two DFT-estimator maps as P x P matrices.
inline std::pair<ComplexMatrix, ComplexMatrix> dft_filters(std::size_t P) {
  detail::require_even(P);
  const ComplexMatrix f = idft_matrix(P);
  const ComplexMatrix fh = f.adjoint();
  const std::size_t half = P / 2;
  ComplexMatrix gate1(P, P), gate2(P, P);
  for (std::size_t k = 0; k < half; ++k) {
    gate1(k, k) = 1.0;
    gate2(k, k + half) = 1.0;
  }
  return {fh * (gate1 * f), fh * (gate2 * f)};
}

// ---------------------------------------------------------------------------
// OCC-based MMSE

inline double occ_noise_variance(double sigma2, OccNoise mode) { return mode == OccNoise::Halved ? sigma2 / 2.0 : sigma2; }

/// Pairwise [1, 1] / [1, -1] despreading: ((h_2p + h_2p+1) / 2, (h_2p - h_2p+1) / 2).
inline std::pair<CVector, CVector> occ_despread(std::span<const cplx> hhat) {
  if (hhat.size() % 2 != 0) throw ShapeError("occ_despread: odd observation length");
  const std::size_t half = hhat.size() / 2;
  CVector sum(half), diff(half);
  for (std::size_t p = 0; p < half; ++p) {
    sum[p] = 0.5 * (hhat[2 * p] + hhat[2 * p + 1]);
    diff[p] = 0.5 * (hhat[2 * p] - hhat[2 * p + 1]);
  }
  return {std::move(sum), std::move(diff)};
}

/// OCC despreading over pilot pairs (2p, 2p+1) followed by a P/2-point Wiener
/// filter per port. `cov` holds sub-grid (P/2 x P/2) covariances; the result is
/// expanded to length P by repeating each estimate on the odd position.
inline PortEstimates occ_mmse_estimate(const LsObservation& obs, const CovarianceSet& cov, const PilotGrid& pg,
                                       OccNoise mode = OccNoise::Halved) {
  const std::size_t P = pg.P();
  if (!pg.half_shift()) throw UnsupportedConfig("OCC-MMSE requires an even pilot count and a cyclic shift of P/2");
  if (obs.hhat.size() != P) throw ShapeError("occ_mmse_estimate: observation length differs from P");
  const std::size_t half = P / 2;
  if (cov.R1.rows() != half || (cov.R2 && cov.R2->rows() != half))
    throw ShapeError("occ_mmse_estimate: covariances must be on the even pilot sub-grid");

  const auto [sum, diff] = occ_despread(obs.hhat);
  const double s2 = occ_noise_variance(cov.sigma2, mode);
  const CVector e1 = apply_mmse(sum, cov.R1, nullptr, {}, s2);
  const CVector e2 = cov.R2 ? apply_mmse(diff, *cov.R2, nullptr, {}, s2) : CVector(half);

  PortEstimates out{CVector(P), CVector(P), Estimator::Occ};
  for (std::size_t p = 0; p < half; ++p) {
    out.h1_hat[2 * p] = out.h1_hat[2 * p + 1] = e1[p];
    out.h2_hat[2 * p] = out.h2_hat[2 * p + 1] = e2[p];
  }
  return out;
}

/// Full-length linear map of the OCC estimator for one port: duplicate * W * despread.
inline ComplexMatrix occ_filter(const ComplexMatrix& r_sub, double sigma2, OccNoise mode, double sign) {
  const std::size_t half = r_sub.rows();
  const ComplexMatrix w = mmse_filter(r_sub, nullptr, {}, occ_noise_variance(sigma2, mode));
  ComplexMatrix out(2 * half, 2 * half);
  for (std::size_t i = 0; i < half; ++i)
    for (std::size_t j = 0; j < half; ++j) {
      const cplx a = 0.5 * w(i, j);
      for (std::size_t row : {2 * i, 2 * i + 1}) {
        out(row, 2 * j) += a;
        out(row, 2 * j + 1) += sign * a;
      }
    }
  return out;
}

// ---------------------------------------------------------------------------
// Cached linear form

/// Estimator reduced to hhat -> (W1 hhat, W2 hhat). `port2` is empty when the
/// second port is silent.
struct LinearEstimator {
  Estimator kind = Estimator::Dft;
  ComplexMatrix port1;
  std::optional<ComplexMatrix> port2;

  PortEstimates apply(const LsObservation& obs) const {
    PortEstimates out{port1 * obs.hhat, {}, kind};
    out.h2_hat = port2 ? *port2 * obs.hhat : CVector(obs.hhat.size());
    return out;
  }

  /// Builds the cached matrices. `r2` is the true port-2 prior, absent when port 2 is silent.
  static LinearEstimator make(Estimator kind, const PilotGrid& pg, const ComplexMatrix& r1,
                              const std::optional<ComplexMatrix>& r2, double sigma2,
                              OccNoise occ_mode = OccNoise::Halved) {
    LinearEstimator le;
    le.kind = kind;
    const CVector ramp = detail::conj_ramp(pg.c);
    const ComplexMatrix rot = ComplexMatrix::diagonal(ramp);
    const ComplexMatrix* other1 = r2 ? &*r2 : nullptr;
    switch (kind) {
      case Estimator::Dft: {
        auto [w1, w2] = dft_filters(pg.P());
        le.port1 = std::move(w1);
        if (r2) le.port2 = std::move(w2);
        break;
      }
      case Estimator::Occ: {
        if (!pg.half_shift()) throw UnsupportedConfig("OCC-MMSE requires an even pilot count and a cyclic shift of P/2");
        le.port1 = occ_filter(even_subgrid(r1), sigma2, occ_mode, 1.0);
        if (r2) le.port2 = occ_filter(even_subgrid(*r2), sigma2, occ_mode, -1.0);
        break;
      }
      case Estimator::FMmse:
        le.port1 = mmse_filter(r1, other1, pg.c, sigma2);
        if (r2) le.port2 = mmse_filter(*r2, &r1, ramp, sigma2) * rot;
        break;
      case Estimator::PMmse:
        le.port1 = mmse_filter(r1, &r1, pg.c, sigma2);
        if (r2) le.port2 = mmse_filter(*r2, &*r2, ramp, sigma2) * rot;
        break;
      case Estimator::SinglePortMmse:
        le.port1 = mmse_filter(r1, nullptr, {}, sigma2);
        if (r2) le.port2 = mmse_filter(*r2, nullptr, {}, sigma2) * rot;
        break;
      case Estimator::Perfect:
        throw ConfigError("the perfect-CSI reference has no linear form");
    }
    return le;
  }
};

}  // namespace estlab
