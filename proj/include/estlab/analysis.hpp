// SPDX-License-Identifier: Apache-2.0
//
// Closed-form MSE of linear port-1 estimators and time-domain coefficient
// matrices of the MMSE filters.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "estlab/errors.hpp"
#include "estlab/estimators.hpp"
#include "estlab/numerics.hpp"

namespace estlab {

enum class FilterKind { FMmse, PMmse, SinglePort };

struct FilterMatrix {
  ComplexMatrix W;
  FilterKind kind = FilterKind::FMmse;
};

/// Tr{W R1 W^H + W C R2 C^H W^H + sigma2 W W^H - W R1 - R1 W^H + R1}: the MSE
/// of hhat1 = W hhat when h1, h2 and the noise are mutually independent.
/// A null `r2` means port 2 is silent.
inline double analytic_mse(const ComplexMatrix& w, const ComplexMatrix& r1, const ComplexMatrix* r2,
                           std::span<const cplx> c, double sigma2) {
  if (!w.square() || w.rows() != r1.rows()) throw ShapeError("analytic_mse: dimension mismatch");
  const ComplexMatrix wh = w.adjoint();
  const ComplexMatrix wr1 = w * r1;
  cplx t = (wr1 * wh).trace();
  if (r2 != nullptr) t += (w * diag_sandwich(c, *r2, c) * wh).trace();
  t += sigma2 * (w * wh).trace();
  t -= wr1.trace();
  t -= (r1 * wh).trace();
  t += r1.trace();
  return t.real();
}

/// MSE of the full-prior filter A = R1 (R1 + C R2 C^H + sigma2 I)^{-1}.
inline double analytic_mse_f(const ComplexMatrix& r1, const ComplexMatrix& r2, std::span<const cplx> c, double sigma2) {
  return analytic_mse(mmse_filter(r1, &r2, c, sigma2), r1, &r2, c, sigma2);
}

/// MSE of the partial-prior filter B = R1 (R1 + C R1 C^H + sigma2 I)^{-1}; the
/// true R2 still shapes the interference term.
inline double analytic_mse_p(const ComplexMatrix& r1, const ComplexMatrix& r2, std::span<const cplx> c, double sigma2) {
  return analytic_mse(mmse_filter(r1, &r1, c, sigma2), r1, &r2, c, sigma2);
}

/// Phi = F Rnum (Rnum + C Rden2 C^H + sigma2 I)^{-1} F^H.
inline ComplexMatrix build_phi(const ComplexMatrix& rnum, const ComplexMatrix& rden2, std::span<const cplx> c,
                               double sigma2) {
  const ComplexMatrix f = idft_matrix(rnum.rows());
  return f * mmse_filter(rnum, &rden2, c, sigma2) * f.adjoint();
}

inline std::vector<double> diag_magnitudes(const ComplexMatrix& phi) {
  if (!phi.square()) throw ShapeError("diag_magnitudes: matrix is not square");
  std::vector<double> d(phi.rows());
  for (std::size_t p = 0; p < d.size(); ++p) d[p] = std::abs(phi(p, p));
  return d;
}

}  // namespace estlab
