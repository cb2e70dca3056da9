#include "neharisp/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace neharisp {

// FFTW's planner is not thread-safe; execution on distinct buffers is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct SpectralBox::Impl {
  int n = 0;
  std::size_t nreal = 0, ncplx = 0;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr, bwd = nullptr;
  std::vector<double> kd;   // derivative wavenumber per index (Nyquist zeroed)
  std::vector<double> kd2;  // kd^2

  explicit Impl(const Grid3& g) : n(g.n) {
    nreal = g.npts();
    ncplx = std::size_t(n) * n * (n / 2 + 1);
    real = fftw_alloc_real(nreal);
    cplx = fftw_alloc_complex(ncplx);
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      fwd = fftw_plan_dft_r2c_3d(n, n, n, real, cplx, FFTW_ESTIMATE);
      bwd = fftw_plan_dft_c2r_3d(n, n, n, cplx, real, FFTW_ESTIMATE);
    }
    kd.resize(n);
    kd2.resize(n);
    const double base = kPi / g.L;
    for (int j = 0; j < n; ++j) {
      const int f = (j <= n / 2) ? j : j - n;
      // even-order multipliers keep the full Nyquist weight: a zero there
      // would make the checkerboard mode kinetic-free and minimizers ride it
      kd2[j] = base * base * double(f) * f;
      // odd derivatives of a real signal have no representable Nyquist part
      kd[j] = (j == n / 2) ? 0.0 : base * f;
    }
  }
  ~Impl() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(cplx);
  }

  void forward(const Field3& u) {
    std::copy(u.v.begin(), u.v.end(), real);
    fftw_execute(fwd);
  }
  Field3 inverse_scaled(const Grid3& g) {
    fftw_execute(bwd);
    Field3 out(g);
    const double s = 1.0 / double(nreal);
    for (std::size_t i = 0; i < nreal; ++i) out.v[i] = real[i] * s;
    return out;
  }
};

SpectralBox::SpectralBox(const Grid3& g) : grid_(g), impl_(std::make_unique<Impl>(g)) {}
SpectralBox::~SpectralBox() = default;

double SpectralBox::grad_sq(const Field3& u) {
  require_same_grid(u.grid, grid_, "grad_sq");
  impl_->forward(u);
  const int n = impl_->n;
  const int nz = n / 2 + 1;
  long double acc = 0.0L;
  std::size_t at = 0;
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      const double kxy = impl_->kd2[ix] + impl_->kd2[iy];
      for (int iz = 0; iz < nz; ++iz, ++at) {
        const double re = impl_->cplx[at][0];
        const double im = impl_->cplx[at][1];
        // conjugate-pair weight for the half-spectrum layout
        const double w = (iz == 0 || iz == n / 2) ? 1.0 : 2.0;
        acc += (long double)(w * (kxy + impl_->kd2[iz]) * (re * re + im * im));
      }
    }
  }
  // unnormalized transform: sum_k |u_hat|^2 = N sum_x |u|^2
  return double(acc) * grid_.cell_volume() / double(impl_->nreal);
}

Field3 SpectralBox::neg_laplacian(const Field3& u) {
  require_same_grid(u.grid, grid_, "neg_laplacian");
  impl_->forward(u);
  const int n = impl_->n;
  const int nz = n / 2 + 1;
  std::size_t at = 0;
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      const double kxy = impl_->kd2[ix] + impl_->kd2[iy];
      for (int iz = 0; iz < nz; ++iz, ++at) {
        const double k2 = kxy + impl_->kd2[iz];
        impl_->cplx[at][0] *= k2;
        impl_->cplx[at][1] *= k2;
      }
    }
  }
  return impl_->inverse_scaled(grid_);
}

Field3 SpectralBox::derivative(const Field3& u, int axis) {
  require_same_grid(u.grid, grid_, "derivative");
  if (axis < 0 || axis > 2) throw Error("derivative: axis must be 0..2");
  impl_->forward(u);
  const int n = impl_->n;
  const int nz = n / 2 + 1;
  std::size_t at = 0;
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      for (int iz = 0; iz < nz; ++iz, ++at) {
        const int idx = axis == 0 ? ix : axis == 1 ? iy : iz;
        const double k = impl_->kd[idx];
        const double re = impl_->cplx[at][0];
        const double im = impl_->cplx[at][1];
        impl_->cplx[at][0] = -k * im;
        impl_->cplx[at][1] = k * re;
      }
    }
  }
  return impl_->inverse_scaled(grid_);
}

Field3 SpectralBox::helmholtz_inverse(const Field3& r, double shift) {
  require_same_grid(r.grid, grid_, "helmholtz_inverse");
  if (!(shift > 0.0)) throw Error("helmholtz_inverse: shift must be positive");
  impl_->forward(r);
  const int n = impl_->n;
  const int nz = n / 2 + 1;
  std::size_t at = 0;
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      const double kxy = impl_->kd2[ix] + impl_->kd2[iy];
      for (int iz = 0; iz < nz; ++iz, ++at) {
        const double d = 1.0 / (kxy + impl_->kd2[iz] + shift);
        impl_->cplx[at][0] *= d;
        impl_->cplx[at][1] *= d;
      }
    }
  }
  return impl_->inverse_scaled(grid_);
}

double h1_norm_sq(SpectralBox& box, const Field3& u, const Field3& V) {
  require_same_grid(u.grid, V.grid, "h1_norm_sq");
  double vmin = V.v.empty() ? 0.0 : V.v[0];
  for (double x : V.v) vmin = std::min(vmin, x);
  if (!(vmin > 0.0)) {
    throw PotentialError("h1_norm_sq: nonpositive V detected (min = " +
                         std::to_string(vmin) + ")");
  }
  long double acc = 0.0L;
  for (std::size_t i = 0; i < u.size(); ++i) {
    acc += (long double)V.v[i] * u.v[i] * u.v[i];
  }
  return box.grad_sq(u) + double(acc) * u.grid.cell_volume();
}

}  // namespace neharisp
