#include <cmath>
#include <random>

#include "doctest.h"
#include "neharisp/coulomb.hpp"
#include "neharisp/fft.hpp"
#include "neharisp/radial.hpp"

using namespace neharisp;

namespace {

Field3 bump_field(const Grid3& g, unsigned seed, int nb, bool positive) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cdist(-g.L / 3.0, g.L / 3.0);
  std::uniform_real_distribution<double> wdist(0.8, 2.2);
  std::uniform_real_distribution<double> adist(0.2, 1.0);
  std::bernoulli_distribution flip(0.5);
  Field3 f(g);
  for (int k = 0; k < nb; ++k) {
    const Vec3 c{cdist(rng), cdist(rng), cdist(rng)};
    const double w = wdist(rng);
    const double a = adist(rng) * (positive || !flip(rng) ? 1.0 : -1.0);
    std::size_t at = 0;
    for (int ix = 0; ix < g.n; ++ix) {
      for (int iy = 0; iy < g.n; ++iy) {
        for (int iz = 0; iz < g.n; ++iz, ++at) {
          const Vec3 p{g.coord(ix), g.coord(iy), g.coord(iz)};
          const Vec3 d = p - c;
          f.v[at] += a * std::exp(-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) /
                                  (2.0 * w * w));
        }
      }
    }
  }
  return f;
}

// oracle for int phi u^2 with u^2 = exp(-r^2): 1D quadrature of
// pi^{3/2} erf(r)/r * exp(-r^2) * 4 pi r^2
double gaussian_pairing_oracle() {
  const int n = 200001;
  const double R = 20.0, h = R / (n - 1);
  long double acc = 0.0L;
  for (int i = 1; i < n; ++i) {
    const double r = i * h;
    const double f = std::pow(kPi, 1.5) * std::erf(r) / r * std::exp(-r * r) *
                     4.0 * kPi * r * r;
    acc += f * ((i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  return double(acc) * h / 3.0;
}

}  // namespace

TEST_SUITE_BEGIN("coulomb");

TEST_CASE("gaussian potential oracle at n=64") {
  const Grid3 g(64, 12.0);
  const CoulombKernel kernel(g);
  CoulombWorkspace ws(g);
  const Field3 u = sample_field(g, [](const Vec3& p) {
    return std::exp(-0.5 * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
  });
  const Field3 phi = coulomb_potential(u, nullptr, kernel, ws);
  double max_rel = 0.0, phi_min = phi.v[0];
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double r = norm(g.point(i));
    phi_min = std::min(phi_min, phi.v[i]);
    if (r >= g.L / 2.0) continue;
    const double exact =
        r > 1e-12 ? std::pow(kPi, 1.5) * std::erf(r) / r : 2.0 * kPi;
    max_rel = std::max(max_rel, std::fabs(phi.v[i] - exact) / exact);
  }
  CHECK(max_rel < 1e-3);
  CHECK(phi_min >= 0.0);

  const double pairing = coulomb_energy(u, nullptr, kernel, ws);
  const double oracle = gaussian_pairing_oracle();
  CHECK(oracle == doctest::Approx(std::sqrt(2.0) * std::pow(kPi, 2.5))
                      .epsilon(1e-10));  // the 1D oracle itself is sane
  CHECK(std::fabs(pairing - oracle) / oracle < 1e-3);
}

TEST_CASE("zero field, scalings, positivity") {
  const Grid3 g(32, 10.0);
  const CoulombKernel kernel(g);
  CoulombWorkspace ws(g);

  const Field3 zero(g);
  const Field3 phi0 = coulomb_potential(zero, nullptr, kernel, ws);
  CHECK(linf_norm(phi0) == 0.0);
  CHECK(coulomb_energy(zero, nullptr, kernel, ws) == 0.0);

  const Field3 u = bump_field(g, 11, 4, false);
  const Field3 phi = coulomb_potential(u, nullptr, kernel, ws);
  const double e = coulomb_energy(u, nullptr, kernel, ws);
  for (double t : {0.5, 2.0, 3.0}) {
    Field3 tu = u;
    for (double& x : tu.v) x *= t;
    const Field3 phit = coulomb_potential(tu, nullptr, kernel, ws);
    double dev = 0.0;
    const double scale = linf_norm(phit);
    for (std::size_t i = 0; i < phi.size(); ++i) {
      dev = std::max(dev, std::fabs(phit.v[i] - t * t * phi.v[i]));
    }
    CHECK(dev / scale < 1e-10);
    const double et = coulomb_energy(tu, nullptr, kernel, ws);
    CHECK(std::fabs(et - t * t * t * t * e) / std::fabs(et) < 1e-10);
  }

  for (unsigned seed : {21u, 22u, 23u}) {
    const Field3 v = bump_field(g, seed, 5, false);
    const Field3 pv = coulomb_potential(v, nullptr, kernel, ws);
    double mn = pv.v[0];
    for (double x : pv.v) mn = std::min(mn, x);
    CHECK(mn >= 0.0);
  }
}

TEST_CASE("bilinear form symmetry") {
  const Grid3 g(32, 10.0);
  const CoulombKernel kernel(g);
  CoulombWorkspace ws(g);
  for (unsigned seed : {3u, 4u}) {
    Field3 f = bump_field(g, seed, 4, true);
    Field3 h = bump_field(g, seed + 50, 4, true);
    const Field3 gf = ws.convolve(kernel, f);
    const Field3 gh = ws.convolve(kernel, h);
    const double a = inner_product(gf, h);
    const double b = inner_product(gh, f);
    CHECK(std::fabs(a - b) / std::fabs(a) < 1e-10);
  }
}

TEST_CASE("quadratic map continuity") {
  const Grid3 g(32, 10.0);
  const CoulombKernel kernel(g);
  CoulombWorkspace ws(g);
  SpectralBox box(g);
  const Field3 u = bump_field(g, 31, 4, true);

  auto h1ish = [&](const Field3& f) {
    return std::sqrt(box.grad_sq(f) + inner_product(f, f));
  };
  const Field3 w = bump_field(g, 32, 3, false);
  double prev_gap = -1.0;
  for (double delta : {0.1, 0.05, 0.025}) {
    Field3 v = u;
    Field3 diff_uv(g);
    for (std::size_t i = 0; i < v.size(); ++i) {
      v.v[i] += delta * w.v[i];
      diff_uv.v[i] = u.v[i] - v.v[i];
    }
    const Field3 pu = coulomb_potential(u, nullptr, kernel, ws);
    const Field3 pv = coulomb_potential(v, nullptr, kernel, ws);
    Field3 diff = pu;
    for (std::size_t i = 0; i < diff.size(); ++i) diff.v[i] -= pv.v[i];
    const double lhs = lp_norm(diff, 2.0);
    const double rhs = (h1ish(u) + h1ish(v)) * h1ish(diff_uv);
    CHECK(lhs <= 5.0 * rhs);  // C = 5 comfortably covers this box
    if (prev_gap > 0.0) {
      // halving the perturbation roughly halves the gap
      CHECK(lhs < prev_gap);
    }
    prev_gap = lhs;
  }
}

TEST_CASE("embedding bound (both sides, scale invariance)") {
  const Grid3 g(32, 10.0);
  const CoulombKernel kernel(g);
  CoulombWorkspace ws(g);
  const double S = 0.75 * std::pow(2.0 * kPi * kPi, 2.0 / 3.0);

  const Field3 gauss = sample_field(g, [](const Vec3& p) {
    return std::exp(-0.5 * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
  });
  const CoulombBound bg = coulomb_bound_check(gauss, kernel, ws, S);
  CHECK(bg.lhs < bg.rhs);

  const Field3 u = bump_field(g, 77, 5, true);
  const CoulombBound b1 = coulomb_bound_check(u, kernel, ws, S);
  CHECK(b1.lhs < b1.rhs);
  for (double t : {0.5, 2.0}) {
    Field3 tu = u;
    for (double& x : tu.v) x *= t;
    const CoulombBound bt = coulomb_bound_check(tu, kernel, ws, S);
    CHECK(bt.lhs / b1.lhs == doctest::Approx(t * t).epsilon(1e-9));
    CHECK(bt.rhs / b1.rhs == doctest::Approx(t * t).epsilon(1e-9));
  }
  CHECK_THROWS_AS(coulomb_bound_check(Field3(g), kernel, ws, S), Error);
}

TEST_CASE("radial coulomb: far field, zero, 3d agreement") {
  RadialGrid rg(4096, 60.0);
  RadialField zero(rg);
  const RadialField phi0 = radial_coulomb(zero);
  for (double x : phi0.v) CHECK(x == 0.0);

  RadialField bump(rg);
  for (int j = 0; j < rg.n_r; ++j) {
    const double r = rg.r(j);
    bump.v[std::size_t(j)] = std::exp(-std::pow(r / 2.0, 6.0));
  }
  const RadialField phi = radial_coulomb(bump);
  long double mass = 0.0L;
  for (int j = 0; j < rg.n_r; ++j) {
    const double r = rg.r(j);
    mass += (long double)bump.v[std::size_t(j)] * bump.v[std::size_t(j)] * r * r;
  }
  const double total = 4.0 * kPi * double(mass) * rg.dr();
  const int far = rg.n_r - 8;
  const double expect = total / rg.r(far);
  CHECK(std::fabs(phi.v[std::size_t(far)] - expect) / expect < 1e-4);

  // same gaussian through the radial formula and the 3D solver, on a ray
  const Grid3 g(64, 12.0);
  const CoulombKernel kernel(g);
  CoulombWorkspace ws(g);
  const Field3 u3 = sample_field(g, [](const Vec3& p) {
    return std::exp(-0.5 * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
  });
  const Field3 phi3 = coulomb_potential(u3, nullptr, kernel, ws);
  RadialField ur(rg);
  for (int j = 0; j < rg.n_r; ++j) {
    ur.v[std::size_t(j)] = std::exp(-0.5 * rg.r(j) * rg.r(j));
  }
  const RadialField phir = radial_coulomb(ur);
  for (int ix = g.n / 2 + 1; ix < g.n / 2 + 16; ++ix) {
    const double x = g.coord(ix);
    const double from3d = phi3.v[g.index(ix, g.n / 2, g.n / 2)];
    const double fromr = radial_interp(phir, x);
    CHECK(std::fabs(from3d - fromr) / fromr < 1e-3);
  }
}

TEST_SUITE_END();
