#include <cmath>
#include <random>

#include "doctest.h"
#include "neharisp/config.hpp"
#include "neharisp/functional.hpp"
#include "neharisp/radial.hpp"

using namespace neharisp;

namespace {

PotentialSet constants() {
  PotentialSet P;
  P.V = Expr::parse("1");
  P.Q.push_back({Expr::parse("1"), 4.5});
  P.i0 = 1;
  P.K = Expr::parse("1");
  P.limits = {1.0, {1.0}, 1.0, 1.0};
  return P;
}

Field3 bumps(const Grid3& g, unsigned seed, bool positive) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cdist(-g.L / 3.0, g.L / 3.0);
  std::uniform_real_distribution<double> wdist(0.9, 2.0);
  std::uniform_real_distribution<double> adist(0.3, 1.0);
  std::bernoulli_distribution flip(0.5);
  Field3 f(g);
  for (int k = 0; k < 4; ++k) {
    const Vec3 c{cdist(rng), cdist(rng), cdist(rng)};
    const double w = wdist(rng);
    const double a = adist(rng) * (positive || !flip(rng) ? 1.0 : -1.0);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Vec3 d = g.point(i) - c;
      f.v[i] += a * std::exp(-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) /
                             (2.0 * w * w));
    }
  }
  return f;
}

}  // namespace

TEST_SUITE_BEGIN("functional");

TEST_CASE("breakdown: zero field, term scalings, exact total") {
  const Grid3 g(32, 10.0);
  const CoulombKernel kernel(g);
  FunctionalWorkspace ws(g);
  const MaterializedPotentials mat = materialize(constants(), g, 1.0);

  const EnergyBreakdown e0 = energy(Field3(g), mat, kernel, ws);
  CHECK(e0.total == 0.0);
  CHECK(e0.quadratic == 0.0);
  CHECK(e0.poisson == 0.0);

  const Field3 u = bumps(g, 5, true);
  const NehariCoeffs c = nehari_coeffs(u, mat, kernel, ws);
  const EnergyBreakdown e1 = energy_breakdown(c);
  const double sum = e1.quadratic + e1.poisson + e1.subcritical[0] + e1.critical;
  CHECK(std::fabs(e1.total - sum) <= 1e-12 * std::fabs(e1.total));

  const double t = 1.7;
  Field3 tu = u;
  for (double& x : tu.v) x *= t;
  const EnergyBreakdown et = energy(tu, mat, kernel, ws);
  CHECK(et.quadratic ==
        doctest::Approx(t * t * e1.quadratic).epsilon(1e-11));
  CHECK(et.poisson ==
        doctest::Approx(std::pow(t, 4.0) * e1.poisson).epsilon(1e-11));
  CHECK(et.subcritical[0] ==
        doctest::Approx(std::pow(t, 4.5) * e1.subcritical[0]).epsilon(1e-11));
  CHECK(et.critical ==
        doctest::Approx(std::pow(t, 6.0) * e1.critical).epsilon(1e-11));
}

TEST_CASE("cross-discretization: 3d energy matches the radial evaluation") {
  const Grid3 g(64, 12.0);
  const CoulombKernel kernel(g);
  FunctionalWorkspace ws(g);
  const PotentialSet P = constants();
  const MaterializedPotentials mat = materialize(P, g, 1.0);
  const Field3 u = sample_field(g, [](const Vec3& p) {
    const double r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    return std::exp(-0.5 * r2);
  });
  const EnergyBreakdown e3 = energy(u, mat, kernel, ws);

  RadialGrid rg(4096, 60.0);
  RadialField ur(rg);
  for (int j = 0; j < rg.n_r; ++j) {
    ur.v[std::size_t(j)] = std::exp(-0.5 * rg.r(j) * rg.r(j));
  }
  const EnergyBreakdown er = radial_energy(ur, P.frozen_at({0, 0, 0}));
  CHECK(std::fabs(e3.total - er.total) / std::fabs(er.total) < 1e-3);
  CHECK(std::fabs(e3.poisson - er.poisson) / er.poisson < 1e-3);
}

TEST_CASE("residual: zero field and gradient consistency") {
  const Grid3 g(32, 10.0);
  const CoulombKernel kernel(g);
  FunctionalWorkspace ws(g);
  PotentialSet P = constants();
  P.V = Expr::parse("1 + 0.2*exp(-0.2*(x^2 + y^2 + z^2))");
  const MaterializedPotentials mat = materialize(P, g, 1.0);

  const Field3 r0 = residual(Field3(g), mat, kernel, ws);
  CHECK(linf_norm(r0) == 0.0);

  const Field3 u = bumps(g, 17, true);
  const Field3 r = residual(u, mat, kernel, ws);
  for (unsigned seed : {40u, 41u, 42u, 43u, 44u}) {
    const Field3 w = bumps(g, seed, false);
    const double pairing = inner_product(r, w);
    const double delta = 3e-4 * lp_norm(u, 2.0) / lp_norm(w, 2.0);
    Field3 up = u, um = u;
    for (std::size_t i = 0; i < u.size(); ++i) {
      up.v[i] += delta * w.v[i];
      um.v[i] -= delta * w.v[i];
    }
    const double fd = (energy(up, mat, kernel, ws).total -
                       energy(um, mat, kernel, ws).total) /
                      (2.0 * delta);
    CHECK(std::fabs(fd - pairing) / std::fabs(fd) < 1e-6);
  }
}

TEST_CASE("nehari scalar: signs, bracketing, monotonicity where positive") {
  const Grid3 g(32, 10.0);
  const CoulombKernel kernel(g);
  FunctionalWorkspace ws(g);
  const MaterializedPotentials mat = materialize(constants(), g, 1.0);
  const Field3 u = bumps(g, 3, true);
  const NehariCoeffs c = nehari_coeffs(u, mat, kernel, ws);

  CHECK(nehari_scalar(c, 1e-9) < 0.0);  // -A at t -> 0
  CHECK(nehari_scalar(c, 1e6) > 0.0);   // t^4 critical dominance
  double prev = -1e300;
  bool entered = false;
  for (double t = 0.05; t < 50.0; t *= 1.3) {
    const double f = nehari_f(c, t);
    if (f > 0.0) {
      if (entered) CHECK(f > prev);
      entered = true;
      prev = f;
    }
  }
  CHECK(entered);
  CHECK_THROWS_AS(nehari_scalar(NehariCoeffs{}, 1.0), Error);
}

TEST_CASE("nehari projection: fixed point, ray invariance, scalar oracle") {
  const Grid3 g(32, 10.0);
  const CoulombKernel kernel(g);
  FunctionalWorkspace ws(g);
  const MaterializedPotentials mat = materialize(constants(), g, 1.0);

  const Field3 u = bumps(g, 23, true);
  const NehariPoint p = nehari_project(u, mat, kernel, ws);
  CHECK(p.nehari_residual <= 1e-10);

  Field3 onm = u;  // scaled onto the manifold
  for (double& x : onm.v) x *= p.t;
  const NehariPoint fixed = nehari_project(onm, mat, kernel, ws);
  CHECK(std::fabs(fixed.t - 1.0) <= 1e-8);

  for (double lam : {0.5, 2.0}) {
    Field3 lu = u;
    for (double& x : lu.v) x *= lam;
    const NehariPoint pl = nehari_project(lu, mat, kernel, ws);
    CHECK(std::fabs(lam * pl.t - p.t) / p.t <= 1e-9);
  }

  // independent scalar bisection on the same quadrature coefficients
  const NehariCoeffs c = nehari_coeffs(u, mat, kernel, ws);
  auto g_of = [&](double t) {
    double f = -t * t * c.B + std::pow(t, c.q[0] - 2.0) * c.C[0] +
               t * t * t * t * c.D;
    return f - c.A;
  };
  double lo = 1e-6, hi = 1.0;
  while (g_of(hi) <= 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g_of(mid) < 0.0 ? lo : hi) = mid;
  }
  CHECK(std::fabs(0.5 * (lo + hi) - p.t) <= 1e-10 * p.t);
}

TEST_CASE("degenerate projection is reported distinctly") {
  const Grid3 g(32, 10.0);
  const CoulombKernel kernel(g);
  FunctionalWorkspace ws(g);
  PotentialSet P;  // repulsive-only: no attractive integral anywhere
  P.V = Expr::parse("1");
  P.Q.push_back({Expr::parse("0 - 1"), 4.5});
  P.i0 = 1;
  P.K = Expr::parse("0");
  P.limits = {1.0, {-1.0}, 0.0, 1.0};
  validate_potentials(P);
  const MaterializedPotentials mat = materialize(P, g, 1.0);
  const Field3 u = bumps(g, 9, true);
  CHECK_THROWS_AS(nehari_project(u, mat, kernel, ws), DegenerateNehariError);
}

TEST_CASE("coercivity gap on the manifold") {
  const Grid3 g(32, 10.0);
  const CoulombKernel kernel(g);
  FunctionalWorkspace ws(g);
  const MaterializedPotentials mat = materialize(constants(), g, 1.0);

  for (unsigned seed : {60u, 61u, 62u, 63u}) {
    Field3 u = bumps(g, seed, true);
    const NehariPoint p = nehari_project(u, mat, kernel, ws);
    for (double& x : u.v) x *= p.t;
    const NehariCoeffs c = nehari_coeffs(u, mat, kernel, ws);
    const double gap = coercivity_gap(u, mat, kernel, ws);
    CHECK(gap >= -1e-8 * c.A);

    // m = 1 with Q >= 0, i0 = 1: the gap is a sum of nonnegative terms
    const double qp = c.q[0];
    const double poisson_part = (0.25 - 1.0 / qp) * c.B;
    const double critical_part = (1.0 / qp - 1.0 / 6.0) * c.D;
    CHECK(poisson_part >= 0.0);
    CHECK(critical_part >= 0.0);
    CHECK(gap == doctest::Approx(poisson_part + critical_part)
                     .epsilon(1e-6));
  }

  const Field3 off = bumps(g, 99, true);  // not projected
  CHECK_THROWS_AS(coercivity_gap(off, mat, kernel, ws), Error);
}

TEST_SUITE_END();
