#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "neharisp/grid.hpp"

namespace neharisp {

/// Spectral differentiation on one periodic box.  Owns its FFTW plans and
/// scratch, so a single instance must not be used from two threads at once;
/// construct one per worker instead (plans are cheap FFTW_ESTIMATE plans,
/// which also keeps runs bit-reproducible).
///
/// The even-order multipliers (seminorm, Laplacian, Helmholtz inverse) carry
/// the full |k|^2 including the Nyquist weight; the first-derivative operator
/// zeroes Nyquist as usual for real signals, so grad_sq(u) equals
/// inner_product(u, neg_laplacian(u)) exactly, while the componentwise
/// gradient route can differ on fields with Nyquist content.
class SpectralBox {
 public:
  explicit SpectralBox(const Grid3& g);
  ~SpectralBox();

  SpectralBox(const SpectralBox&) = delete;
  SpectralBox& operator=(const SpectralBox&) = delete;

  const Grid3& grid() const { return grid_; }

  /// integral |grad u|^2 dx via the Fourier multiplier sum.
  double grad_sq(const Field3& u);

  /// -Laplacian u.
  Field3 neg_laplacian(const Field3& u);

  /// d/dx_axis u (axis 0..2).
  Field3 derivative(const Field3& u, int axis);

  /// (-Laplacian + shift)^{-1} r, shift > 0.
  Field3 helmholtz_inverse(const Field3& r, double shift);

 private:
  struct Impl;
  Grid3 grid_;
  std::unique_ptr<Impl> impl_;
};

/// ||u||_eps^2 = integral (|grad u|^2 + V |u|^2) dx.  V must be strictly
/// positive on the grid.
double h1_norm_sq(SpectralBox& box, const Field3& u, const Field3& V);

}  // namespace neharisp
