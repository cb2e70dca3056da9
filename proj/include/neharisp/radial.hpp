#pragma once

#include "neharisp/functional.hpp"
#include "neharisp/grid.hpp"

namespace neharisp {

struct RadialConfig {
  int n_r = 4096;
  double r_max = 60.0;
  double tol = 1e-7;  // Euler-Lagrange residual, relative
  int max_iters = 4000;
  double backtrack = 0.5;
  std::vector<double> seed_widths = {0.75, 1.5, 3.0};
};

struct RadialSolveResult {
  RadialField u;
  double c = 0.0;  // least energy
  double el_res = 0.0;
  double nehari_residual = 0.0;
  bool converged = false;
  bool multimodal = false;  // restarts disagreed by more than 1e-4
};

/// Ground state of the constant-coefficient problem
///   -Lap u + gamma*phi_u u + a u = sum b_i |u|^{q_i-2} u + b_crit |u|^4 u
/// on the radial grid, via Nehari-projected descent on w = r u with the
/// exact (-d^2/dr^2 + a)^{-1} sine-transform preconditioner.
///
/// Parameter contract: a > 0, gamma >= 0, b_crit >= 0 and
/// (j - i0) b_j >= 0 away from the pivot (the frozen values of valid
/// potentials satisfy the weak inequalities; strict positivity is only
/// needed for some attractive term, otherwise the Nehari projection is
/// degenerate and DegenerateNehariError propagates).
RadialSolveResult radial_ground_state(const FrozenCoeffs& coeffs,
                                      const RadialConfig& cfg = {});

/// Ray coefficients of I_ab at a radial field (cross-discretization checks
/// and the radial energy evaluation reuse the scalar Nehari layer).
NehariCoeffs radial_nehari_coeffs(const RadialField& u,
                                  const FrozenCoeffs& coeffs);

EnergyBreakdown radial_energy(const RadialField& u, const FrozenCoeffs& coeffs);

/// Piecewise-linear sample of a radial profile; zero beyond r_max.
double radial_interp(const RadialField& u, double r);

}  // namespace neharisp
