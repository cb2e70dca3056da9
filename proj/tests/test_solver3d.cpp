#include <cmath>

#include "doctest.h"
#include "neharisp/config.hpp"
#include "neharisp/solver.hpp"

using namespace neharisp;

namespace {

PotentialSet constants() {
  PotentialSet P;
  P.V = Expr::parse("0.3");
  P.Q.push_back({Expr::parse("30"), 4.2});
  P.i0 = 1;
  P.K = Expr::parse("1");
  P.limits = {0.3, {30.0}, 1.0, 1.0};
  return P;
}

}  // namespace

TEST_SUITE_BEGIN("solver3d");

TEST_CASE("constant coefficients: 3d solve agrees with the radial solver") {
  const Grid3 g(64, 8.0);
  const PotentialSet P = constants();
  const MaterializedPotentials mat = materialize(P, g, 1.0);
  const CoulombKernel kernel(g);

  RadialConfig fine;
  fine.n_r = 8192;
  const RadialSolveResult rad = radial_ground_state(P.frozen_at({0, 0, 0}), fine);
  REQUIRE(rad.converged);

  SolverConfig cfg;
  const Field3 seed = radial_profile_seed(g, {0, 0, 0}, rad.u);
  const GroundState gs = minimize_nehari(mat, kernel, seed, cfg);

  CHECK(gs.converged);
  CHECK(gs.el_residual <= cfg.tol);
  CHECK(gs.nehari_residual <= 1e-10);
  CHECK(gs.positive);
  CHECK(std::fabs(gs.energy - rad.c) / rad.c < 1e-3);
  CHECK(std::sqrt(2.0 * gs.breakdown.quadratic) >= cfg.norm_floor);
  CHECK(gs.energy == doctest::Approx(gs.breakdown.total).epsilon(1e-12));

  // energies are nonincreasing along the accepted iterates
  for (std::size_t i = 0; i + 1 < gs.iters.size(); ++i) {
    CHECK(gs.iters[i + 1].energy <= gs.iters[i].energy + 1e-13);
  }

  // centered L2 profile agreement after normalizing scales
  const Field3 ref = radial_profile_seed(g, gs.max_point, rad.u);
  double diff = 0.0, refn = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    diff += (gs.u.v[i] - ref.v[i]) * (gs.u.v[i] - ref.v[i]);
    refn += ref.v[i] * ref.v[i];
  }
  CHECK(std::sqrt(diff / refn) < 1e-2);

  // restarting from the converged state stops at the initial check
  const GroundState again = minimize_nehari(mat, kernel, gs.u, cfg);
  CHECK(again.converged);
  CHECK(again.iters.size() == 1);
  CHECK(again.energy == doctest::Approx(gs.energy).epsilon(1e-12));
}

TEST_CASE("multistart") {
  const Grid3 g(64, 8.0);
  const RunConfig rc = parse_config(builtin_config("single_well"), "t");
  const PotentialSet& P = rc.potentials;
  const double eps = 0.5;
  const MaterializedPotentials mat = materialize(P, g, eps);
  const CoulombKernel kernel(g);
  SolverConfig cfg;
  cfg.max_iters = 400;
  RadialConfig rcfg;
  rcfg.seed_widths = {1.5};

  SUBCASE("k = 1 equals a plain solve from the argmin seed") {
    const GroundState ms = multistart(P, eps, mat, kernel, cfg, 1, rcfg);
    // the seed the planner picks: the ground-energy argmin (the origin well)
    const RadialSolveResult prof = radial_ground_state(P.frozen_at({0, 0, 0}), rcfg);
    const Field3 seed = radial_profile_seed(g, {0, 0, 0}, prof.u);
    const GroundState manual = minimize_nehari(mat, kernel, seed, cfg);
    CHECK(ms.converged);
    CHECK(manual.converged);
    CHECK(ms.energy == doctest::Approx(manual.energy).epsilon(1e-12));
  }

  SUBCASE("single well: every seed lands on the same level") {
    const GroundState ms = multistart(P, eps, mat, kernel, cfg, 3, rcfg);
    CHECK(ms.converged);
    // independent runs from displaced seeds
    for (const Vec3 c : {Vec3{1.5, 0, 0}, Vec3{0, -2.0, 1.0}}) {
      const RadialSolveResult prof =
          radial_ground_state(P.frozen_at({eps * c[0], eps * c[1], eps * c[2]}), rcfg);
      const Field3 seed = radial_profile_seed(g, c, prof.u);
      const GroundState run = minimize_nehari(mat, kernel, seed, cfg);
      if (run.converged) {
        CHECK(std::fabs(run.energy - ms.energy) / std::fabs(ms.energy) < 1e-6);
        CHECK(ms.energy <= run.energy + 1e-9);
      }
    }
  }
}

TEST_CASE("double well: multistart returns the lower branch") {
  const Grid3 g(64, 8.0);
  PotentialSet P = constants();
  // deeper well left, shallow well right
  P.V = Expr::parse(
      "0.5 - 0.3*exp(-((x + 1)^2 + y^2 + z^2)) - 0.15*exp(-((x - 1)^2 + y^2 + z^2))");
  P.limits.V_inf = 0.5;
  validate_potentials(P);
  const double eps = 1.0;
  const MaterializedPotentials mat = materialize(P, g, eps);
  const CoulombKernel kernel(g);
  SolverConfig cfg;
  cfg.max_iters = 400;
  RadialConfig rcfg;
  rcfg.seed_widths = {1.5};

  const GroundState ms = multistart(P, eps, mat, kernel, cfg, 3, rcfg);
  REQUIRE(ms.converged);
  for (const Vec3 c : {Vec3{-1, 0, 0}, Vec3{1, 0, 0}}) {
    const RadialSolveResult prof = radial_ground_state(P.frozen_at(c), rcfg);
    const Field3 seed = radial_profile_seed(g, c, prof.u);
    const GroundState run = minimize_nehari(mat, kernel, seed, cfg);
    CHECK(ms.energy <= run.energy + 1e-9);
  }
  // concentration at the deeper well
  CHECK(ms.max_point[0] < 0.0);
}

TEST_CASE("iteration budget exhaustion returns best-so-far unconverged") {
  const Grid3 g(32, 8.0);
  const PotentialSet P = constants();
  const MaterializedPotentials mat = materialize(P, g, 1.0);
  const CoulombKernel kernel(g);
  SolverConfig cfg;
  cfg.max_iters = 2;
  const Field3 seed = gaussian_seed(g, {0.4, 0, 0}, 1.2);
  const GroundState gs = minimize_nehari(mat, kernel, seed, cfg);
  CHECK(!gs.converged);
  CHECK(gs.energy > 0.0);
  CHECK(gs.iters.size() >= 1);
  CHECK_THROWS_AS(minimize_nehari(mat, kernel, Field3(g), SolverConfig{}), Error);
}

TEST_SUITE_END();
