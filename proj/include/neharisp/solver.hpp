#pragma once

#include "neharisp/functional.hpp"
#include "neharisp/radial.hpp"

namespace neharisp {

struct SolverConfig {
  int max_iters = 500;
  double tol = 1e-6;           // Euler-Lagrange residual, relative
  double energy_stall = 1e-10;
  double tau0 = 1.0;
  double backtrack = 0.5;
  bool sobolev_precond = true;  // (-Lap + mean V)^{-1} descent metric
  int restarts = 2;             // multistart seed count
  double norm_floor = 1e-3;     // collapse detector on ||u||_eps
};

struct IterRow {
  int iter = 0;
  double energy = 0.0;
  double el_res = 0.0;
  double step = 0.0;
};

struct GroundState {
  Field3 u;
  double energy = 0.0;
  double nehari_residual = 0.0;
  double el_residual = 0.0;
  Vec3 max_point = {0, 0, 0};  // in the solve's own coordinates
  bool positive = false;
  bool converged = false;
  EnergyBreakdown breakdown;
  std::vector<IterRow> iters;
  std::vector<Vec3> max_track;  // max-point trajectory, one entry per iterate
};

/// Nehari-constrained Sobolev-gradient descent from a nonzero seed:
/// project, step against the preconditioned residual with backtracking on
/// the projected energy (accepted energies are nonincreasing), clip the
/// negative part each step.  Converged means the relative EL residual is
/// under cfg.tol and the energy has stalled; otherwise the best iterate is
/// returned with converged = false.
GroundState minimize_nehari(const MaterializedPotentials& P,
                            const CoulombKernel& kernel, const Field3& init,
                            const SolverConfig& cfg);

/// Seed fields.
Field3 gaussian_seed(const Grid3& g, const Vec3& center, double width,
                     double amplitude = 1.0);
Field3 radial_profile_seed(const Grid3& g, const Vec3& center,
                           const RadialField& profile);

/// Deterministic multistart: Gaussian/radial-profile bumps at the k lowest
/// points of a coarse ground-energy scan plus one at the K-maximizer x0;
/// returns the lowest-energy converged state (best unconverged one if no
/// seed converges, SolverError if every seed is degenerate).
/// seed_hints, when nonempty, overrides the scan-derived centers (original
/// spatial coordinates, not solver coordinates).
GroundState multistart(const PotentialSet& pot, double eps,
                       const MaterializedPotentials& P,
                       const CoulombKernel& kernel, const SolverConfig& cfg,
                       int k, const RadialConfig& rcfg = {},
                       const std::vector<Vec3>& seed_hints = {});

}  // namespace neharisp
