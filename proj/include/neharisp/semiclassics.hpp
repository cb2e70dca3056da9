#pragma once

#include "neharisp/solver.hpp"

namespace neharisp {

// --- ground-energy landscape -------------------------------------------------

struct GmapSample {
  Vec3 s = {0, 0, 0};
  double G = 0.0;
  bool degenerate = false;
};

struct GroundEnergyMap {
  std::vector<GmapSample> samples;
  double c0 = 0.0;                // min over non-degenerate samples
  std::vector<Vec3> minimizers;   // tolerance sublevel set of the samples
  double c_inf = 0.0;
  bool existence_verdict = false; // c_inf > c0
  bool flat = false;              // G constant across samples (within tol)
};

struct GmapConfig {
  Vec3 center = {0, 0, 0};
  double halfwidth = 3.0;
  int resolution = 7;      // samples per axis (1 = single point)
  double set_tol = 1e-4;   // relative sublevel tolerance defining the set
  int threads = 1;
};

/// Least energy of the problem frozen at s (h enters squared); degenerate
/// frozen problems raise DegenerateNehariError.
double ground_energy(const PotentialSet& P, const Vec3& s,
                     const RadialConfig& rcfg = {});

/// Least energy of the limiting problem (declared limits, h_inf squared).
double limit_level(const PotentialSet& P, const RadialConfig& rcfg = {});

GroundEnergyMap ground_energy_map(const PotentialSet& P, const GmapConfig& cfg,
                                  const RadialConfig& rcfg = {});

double dist_to_minimizers(const GroundEnergyMap& map, const Vec3& p);

// --- bubble machinery ---------------------------------------------------------

/// Best D^{1,2} -> L^6 embedding constant from the Rayleigh quotient of the
/// uncut extremal profile (3 sigma^2)^{1/4} (sigma^2 + r^2)^{-1/2}; the value
/// is sigma-independent.
double sobolev_constant(double sigma = 1.0);

struct BubbleRow {
  double sigma = 0.0;
  double grad_sq = 0.0;
  double l6 = 0.0;
  double l2 = 0.0, l2_5 = 0.0, l3 = 0.0, l4 = 0.0, l5 = 0.0;
  bool cutoff_dominated = false;  // sigma too large relative to R
};

/// Cutoff-bubble integrals for each sigma: profile xi(|x - x0|) u_sigma with
/// xi == 1 on B_R, 0 outside B_2R (integrals are translation invariant in x0).
std::vector<BubbleRow> bubble_estimates(const std::vector<double>& sigma_list,
                                        const Vec3& x0, double R);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

struct CriticalLevelCheck {
  bool holds = false;
  double margin = 0.0;
  double threshold = 0.0;  // (1/3) S^{3/2} |K|_inf^{-1/2}
};
CriticalLevelCheck critical_level_check(const GroundEnergyMap& map,
                                        const PotentialSet& P);

// --- concentration diagnostics -------------------------------------------------

struct DecayFit {
  double C = 0.0;
  double mu = 0.0;
  double r2 = 0.0;
  double r_lo = 0.0, r_hi = 0.0;  // fitted annulus
};

/// Log-linear fit of u against the periodic distance from center over the
/// annulus [half-max radius, 0.8 L].  Throws when more than 1% of the
/// annulus is nonpositive; isolated nonpositive points are excluded.
DecayFit decay_fit(const Field3& u, const Vec3& center, double eps);

struct ConcentrationReport {
  double eps = 0.0;
  double c_eps = 0.0;
  Vec3 x_eps = {0, 0, 0};      // physical coordinates (eps * solver max point)
  double dist_to_G = 0.0;      // NaN when the landscape is flat
  double profile_err = 0.0;    // L2 gap to the frozen-limit radial profile
  double mu = 0.0, C = 0.0, fit_q = 0.0;
  double poisson_energy = 0.0;
  bool converged = false;
};

struct ScanTrends {
  double c_lower = 0.0;        // comparison floor at (inf V, sup Q, sup K)
  bool floor_ok = true;        // every converged c_eps >= c_lower - tol
  bool ceiling_ok = true;      // every converged c_eps <= c0 + slack
  bool dist_ok = true;         // nonincreasing along the converged tail
  bool profile_ok = true;      // decreasing along the converged tail
};

struct ScanResult {
  std::vector<ConcentrationReport> reports;
  std::vector<GroundState> states;  // one per eps, aligned with reports
  ScanTrends trends;
};

struct ScanConfig {
  SolverConfig solver;
  RadialConfig radial;
  int threads = 1;
  double level_slack = 0.35;   // relative ceiling slack on c0 at desk scale
};

/// Solve for each eps (decreasing list) via multistart and diagnose
/// concentration against the supplied landscape.
ScanResult epsilon_scan(const PotentialSet& P, const std::vector<double>& eps_list,
                        const Grid3& grid, const GroundEnergyMap& map,
                        const ScanConfig& cfg);

// --- nonexistence probe --------------------------------------------------------

struct RunawayIndicator {
  bool drift = false;    // max point walked away monotonically
  bool plateau = false;  // energy pinned at c_inf while the residual stalls
  bool fired() const { return drift || plateau; }
};

/// Drift/plateau analysis of a finished solve.
RunawayIndicator runaway_analysis(const GroundState& gs, double tol,
                                  double c_inf);

struct NonexistReport {
  double c_eps = 0.0;
  double c_inf = 0.0;
  double rel_gap = 0.0;    // |c_eps - c_inf| / c_inf
  RunawayIndicator runaway;
};

/// Decay-hypothesis configurations only (validator failures throw): solves
/// once seeded in the far region (level evidence) and once on top of the
/// V-bump (translation-runaway evidence).
NonexistReport nonexistence_probe(const PotentialSet& P, double eps,
                                  const Grid3& grid, const SolverConfig& cfg,
                                  const RadialConfig& rcfg = {});

}  // namespace neharisp
