// SPDX-License-Identifier: Apache-2.0
//
// Dense complex linear algebra and reproducible Gaussian sampling.
// Sizes here never exceed a few hundred, so everything is plain O(n^3)
// double-precision code over row-major storage.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "estlab/errors.hpp"

namespace estlab {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const cplx> d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<cplx> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const cplx> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<const cplx> entries() const noexcept { return data_; }
  std::span<cplx> entries() noexcept { return data_; }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  /// Largest |A[m][n] - conj(A[n][m])|; infinite for non-square input.
  double hermitian_deviation() const {
    if (!square()) return INFINITY;
    double dev = 0.0;
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = r; c < cols_; ++c)
        dev = std::max(dev, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
    return dev;
  }

  bool is_hermitian(double tol = 1e-12) const { return hermitian_deviation() <= tol; }

  cplx trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  /// Frobenius norm.
  double norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  ComplexMatrix& operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) throw ShapeError("matrix product: inner dimensions differ");
    ComplexMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      cplx* dst = out.data_.data() + i * b.cols_;
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const cplx aik = a(i, k);
        const cplx* src = b.data_.data() + k * b.cols_;
        for (std::size_t j = 0; j < b.cols_; ++j) dst[j] += aik * src[j];
      }
    }
    return out;
  }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  void require_same_shape(const ComplexMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeError("matrix shapes differ");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

inline CVector operator*(const ComplexMatrix& a, std::span<const cplx> x) {
  if (a.cols() != x.size()) throw ShapeError("matrix-vector product: length mismatch");
  CVector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    // Split real/imaginary accumulation; std::complex multiply is slow without -ffast-math.
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      re += r[k].real() * x[k].real() - r[k].imag() * x[k].imag();
      im += r[k].real() * x[k].imag() + r[k].imag() * x[k].real();
    }
    y[i] = {re, im};
  }
  return y;
}

inline CVector operator*(const ComplexMatrix& a, const CVector& x) { return a * std::span<const cplx>(x); }

/// diag(d) * A * diag(e)^H, i.e. A[m][n] * d[m] * conj(e[n]).
inline ComplexMatrix diag_sandwich(std::span<const cplx> d, const ComplexMatrix& a, std::span<const cplx> e) {
  if (!a.square() || d.size() != a.rows() || e.size() != a.cols())
    throw ShapeError("diag_sandwich: dimension mismatch");
  ComplexMatrix out = a;
  for (std::size_t m = 0; m < a.rows(); ++m)
    for (std::size_t n = 0; n < a.cols(); ++n) out(m, n) *= d[m] * std::conj(e[n]);
  return out;
}

inline double squared_distance(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw ShapeError("squared_distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return s;
}

/// Unitary P-point inverse DFT matrix, F[p][q] = exp(+j 2 pi p q / P) / sqrt(P).
/// The forward DFT is its adjoint.
inline ComplexMatrix idft_matrix(std::size_t p) {
  if (p == 0) throw InvalidDimension("idft_matrix: P must be at least 1");
  ComplexMatrix f(p, p);
  const double scale = 1.0 / std::sqrt(static_cast<double>(p));
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < p; ++c) {
      // Reduce the exponent modulo P before taking the phase to keep it exact for large r*c.
      const auto k = static_cast<double>((r * c) % p);
      f(r, c) = std::polar(scale, 2.0 * std::numbers::pi * k / static_cast<double>(p));
    }
  return f;
}

/// Cholesky factor L (lower triangular, A = L L^H) of a Hermitian positive-definite matrix.
class Cholesky {
 public:
  static constexpr double kHermitianTolerance = 1e-9;

  explicit Cholesky(const ComplexMatrix& a) : l_(a.rows(), a.cols()) {
    if (!a.square()) throw ShapeError("hermitian_solve: matrix is not square");
    if (a.hermitian_deviation() > kHermitianTolerance) throw ShapeError("hermitian_solve: matrix is not Hermitian");
    const std::size_t n = a.rows();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i).real()));
    const double floor = max_diag * static_cast<double>(n) * 1e-15;

    for (std::size_t j = 0; j < n; ++j) {
      double d = a(j, j).real();
      for (std::size_t k = 0; k < j; ++k) d -= std::norm(l_(j, k));
      if (!(d > floor)) throw SingularityError(j);
      const double ljj = std::sqrt(d);
      l_(j, j) = ljj;
      for (std::size_t i = j + 1; i < n; ++i) {
        cplx s = a(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * std::conj(l_(j, k));
        l_(i, j) = s / ljj;
      }
    }
  }

  std::size_t size() const noexcept { return l_.rows(); }
  const ComplexMatrix& factor() const noexcept { return l_; }

  CVector solve(std::span<const cplx> b) const {
    const std::size_t n = size();
    if (b.size() != n) throw ShapeError("hermitian_solve: right-hand side length mismatch");
    CVector x(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < i; ++k) x[i] -= l_(i, k) * x[k];
      x[i] /= l_(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
      for (std::size_t k = ii + 1; k < n; ++k) x[ii] -= std::conj(l_(k, ii)) * x[k];
      x[ii] /= l_(ii, ii);
    }
    return x;
  }

  ComplexMatrix solve(const ComplexMatrix& b) const {
    if (b.rows() != size()) throw ShapeError("hermitian_solve: right-hand side row count mismatch");
    ComplexMatrix x(b.rows(), b.cols());
    CVector col(b.rows());
    for (std::size_t c = 0; c < b.cols(); ++c) {
      for (std::size_t r = 0; r < b.rows(); ++r) col[r] = b(r, c);
      const CVector sol = solve(std::span<const cplx>(col));
      for (std::size_t r = 0; r < b.rows(); ++r) x(r, c) = sol[r];
    }
    return x;
  }

 private:
  ComplexMatrix l_;
};

/// Solves A X = B for Hermitian positive-definite A.
inline ComplexMatrix hermitian_solve(const ComplexMatrix& a, const ComplexMatrix& b) { return Cholesky(a).solve(b); }

inline CVector hermitian_solve(const ComplexMatrix& a, std::span<const cplx> b) { return Cholesky(a).solve(b); }

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Value-typed random stream. Children derived with split() depend only on
/// (parent seed, key), so trial streams are independent of execution order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(detail::splitmix64(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  RngStream split(std::uint64_t key) const {
    return RngStream(detail::splitmix64(detail::splitmix64(seed_) ^ detail::splitmix64(key + 0x632BE59BD9B4E019ULL)));
  }

  /// CN(0, 1): real and imaginary parts each N(0, 1/2).
  cplx cnormal() {
    const double re = half_normal_(engine_);
    const double im = half_normal_(engine_);
    return {re, im};
  }

  std::uint64_t next_u64() { return engine_(); }

  std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> half_normal_{0.0, std::numbers::sqrt2 / 2.0};
};

/// n i.i.d. CN(0, 1) samples.
inline CVector crandn(std::size_t n, RngStream& stream) {
  CVector v(n);
  for (auto& x : v) x = stream.cnormal();
  return v;
}

}  // namespace estlab
