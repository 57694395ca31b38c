// Shared helpers for the test suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>

#include "estlab/estlab.hpp"

namespace estlab::testing {

/// Largest entrywise |a - b|.
inline double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return max_abs_diff(a.entries(), b.entries()); }

inline double max_abs(std::span<const cplx> a) {
  double m = 0.0;
  for (const auto& v : a) m = std::max(m, std::abs(v));
  return m;
}

inline double vec_norm(std::span<const cplx> a) {
  double s = 0.0;
  for (const auto& v : a) s += std::norm(v);
  return std::sqrt(s);
}

/// Independent of RngStream: plain std::mt19937 with uniform entries.
class PlainRng {
 public:
  explicit PlainRng(std::uint32_t seed) : eng_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  cplx cuniform() { return {uniform(), uniform()}; }

  CVector vector(std::size_t n) {
    CVector v(n);
    for (auto& x : v) x = cuniform();
    return v;
  }

  ComplexMatrix matrix(std::size_t r, std::size_t c) {
    ComplexMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) m(i, j) = cuniform();
    return m;
  }

  /// G G^H + shift I.
  ComplexMatrix pd_matrix(std::size_t n, double shift = 0.5) {
    const ComplexMatrix g = matrix(n, n);
    ComplexMatrix a = g * g.adjoint();
    for (std::size_t i = 0; i < n; ++i) a(i, i) += shift;
    return a;
  }

  /// Exponential PDP with random decay and length.
  PowerDelayProfile random_pdp(std::size_t max_taps) {
    const auto taps = static_cast<std::size_t>(uniform(1.0, static_cast<double>(max_taps) + 0.999));
    return exp_pdp(uniform(-0.5, 0.0), std::max<std::size_t>(taps, 1));
  }

  std::mt19937& engine() { return eng_; }

 private:
  std::mt19937 eng_;
};

}  // namespace estlab::testing
