#include "neharisp/coulomb.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace neharisp {

std::mutex& fftw_planner_mutex();

namespace {
// Potential deficit of the unit simple-cubic point lattice at an occupied
// site (Ewald summation); origin weight of the corrected punctured rule.
constexpr double kOriginLatticeConstant = 2.8372974794806;
}  // namespace

CoulombKernel::CoulombKernel(const Grid3& g) : grid_(g), M_(2 * g.n) {
  const int M = M_;
  const double h = g.h();
  const std::size_t nreal = std::size_t(M) * M * M;
  const std::size_t ncplx = std::size_t(M) * M * (M / 2 + 1);

  double* real = fftw_alloc_real(nreal);
  fftw_complex* cplx = fftw_alloc_complex(ncplx);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_3d(M, M, M, real, cplx, FFTW_ESTIMATE);
  }

  // signed minimum image distance per axis on the doubled box
  std::vector<double> d(M);
  for (int i = 0; i < M; ++i) d[i] = h * std::min(i, M - i);
  std::size_t at = 0;
  for (int ix = 0; ix < M; ++ix) {
    for (int iy = 0; iy < M; ++iy) {
      const double dxy = d[ix] * d[ix] + d[iy] * d[iy];
      for (int iz = 0; iz < M; ++iz, ++at) {
        const double r = std::sqrt(dxy + d[iz] * d[iz]);
        real[at] = (r > 0.0) ? 1.0 / r : kOriginLatticeConstant / h;
      }
    }
  }
  fftw_execute(plan);

  mult_.resize(ncplx);
  const double scale = g.cell_volume() / double(nreal);
  double mmax = 0.0;
  for (std::size_t i = 0; i < ncplx; ++i) mmax = std::max(mmax, cplx[i][0]);
  for (std::size_t i = 0; i < ncplx; ++i) {
    double v = cplx[i][0];
    // the symmetric kernel transform is real and positive up to roundoff
    if (v < 0.0) {
      if (v < -1e-9 * mmax) {
        throw Error("CoulombKernel: multiplier went negative, kernel corrupt");
      }
      v = 0.0;
    }
    mult_[i] = v * scale;
  }

  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(real);
  fftw_free(cplx);
}

struct CoulombWorkspace::Impl {
  int M = 0;
  std::size_t nreal = 0, ncplx = 0;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr, bwd = nullptr;

  explicit Impl(int M_) : M(M_) {
    nreal = std::size_t(M) * M * M;
    ncplx = std::size_t(M) * M * (M / 2 + 1);
    real = fftw_alloc_real(nreal);
    cplx = fftw_alloc_complex(ncplx);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fwd = fftw_plan_dft_r2c_3d(M, M, M, real, cplx, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_3d(M, M, M, cplx, real, FFTW_ESTIMATE);
  }
  ~Impl() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(cplx);
  }
};

CoulombWorkspace::CoulombWorkspace(const Grid3& g)
    : grid_(g), impl_(std::make_unique<Impl>(2 * g.n)) {}
CoulombWorkspace::~CoulombWorkspace() = default;

Field3 CoulombWorkspace::convolve(const CoulombKernel& kernel,
                                  const Field3& density) {
  require_same_grid(density.grid, grid_, "coulomb");
  if (!(kernel.grid() == grid_)) {
    throw GridMismatchError("coulomb: kernel built for a different grid");
  }
  const int n = grid_.n;
  const int M = impl_->M;
  std::fill(impl_->real, impl_->real + impl_->nreal, 0.0);
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      const double* src = &density.v[grid_.index(ix, iy, 0)];
      double* dst = impl_->real + (std::size_t(ix) * M + iy) * M;
      std::copy(src, src + n, dst);
    }
  }
  fftw_execute(impl_->fwd);
  const std::vector<double>& mult = kernel.multiplier();
  for (std::size_t i = 0; i < impl_->ncplx; ++i) {
    impl_->cplx[i][0] *= mult[i];
    impl_->cplx[i][1] *= mult[i];
  }
  fftw_execute(impl_->bwd);

  Field3 phi(grid_);
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      const double* src = impl_->real + (std::size_t(ix) * M + iy) * M;
      double* dst = &phi.v[grid_.index(ix, iy, 0)];
      std::copy(src, src + n, dst);
    }
  }
  return phi;
}

namespace {

Field3 weighted_density(const Field3& u, const Field3* h_field) {
  Field3 rho(u.grid);
  if (h_field) {
    require_same_grid(u.grid, h_field->grid, "coulomb weighted density");
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (h_field->v[i] < 0.0) {
        throw PotentialError("coulomb: weight h must be nonnegative");
      }
      rho.v[i] = h_field->v[i] * u.v[i] * u.v[i];
    }
  } else {
    for (std::size_t i = 0; i < u.size(); ++i) rho.v[i] = u.v[i] * u.v[i];
  }
  return rho;
}

}  // namespace

Field3 coulomb_potential(const Field3& u, const Field3* h_field,
                         const CoulombKernel& kernel, CoulombWorkspace& ws) {
  Field3 rho = weighted_density(u, h_field);
  Field3 phi = ws.convolve(kernel, rho);
  double pmax = linf_norm(phi);
  for (double& x : phi.v) {
    // roundoff from the transforms; genuine negatives would mean kernel bugs
    // and are left in place for the oracles to catch
    if (x < 0.0 && x > -1e-10 * pmax) x = 0.0;
  }
  return phi;
}

double coulomb_energy(const Field3& u, const Field3* h_field,
                      const CoulombKernel& kernel, CoulombWorkspace& ws) {
  Field3 rho = weighted_density(u, h_field);
  Field3 phi = ws.convolve(kernel, rho);
  return inner_product(phi, rho);
}

CoulombBound coulomb_bound_check(const Field3& u, const CoulombKernel& kernel,
                                 CoulombWorkspace& ws, double sobolev_S) {
  if (lp_norm(u, 2.0) == 0.0) {
    throw Error("coulomb_bound_check: zero field");
  }
  const double pairing = coulomb_energy(u, nullptr, kernel, ws);
  CoulombBound b;
  b.lhs = std::sqrt(std::max(0.0, pairing) / (4.0 * kPi));
  const double n125 = lp_norm(u, 12.0 / 5.0);
  b.rhs = n125 * n125 / std::sqrt(sobolev_S);
  return b;
}

RadialField radial_coulomb(const RadialField& u) {
  const int n = u.grid.n_r;
  const double dr = u.grid.dr();
  RadialField phi(u.grid);
  // prefix sums of mass m_j = u_j^2 r_j^2 dr and of m_j / r_j
  std::vector<double> mass(n), inv(n);
  for (int j = 0; j < n; ++j) {
    const double r = u.grid.r(j);
    mass[j] = u.v[j] * u.v[j] * r * r * dr;
    inv[j] = mass[j] / r;
  }
  long double inner = 0.0L, outer = 0.0L;
  for (int j = 0; j < n; ++j) outer += inv[j];
  for (int j = 0; j < n; ++j) {
    inner += mass[j];
    outer -= inv[j];
    phi.v[j] = 4.0 * kPi * (double(inner) / u.grid.r(j) + double(outer));
  }
  return phi;
}

}  // namespace neharisp
