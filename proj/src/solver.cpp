#include "neharisp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace neharisp {

namespace {

Vec3 max_point_of(const Field3& u) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < u.size(); ++i) {
    if (u.v[i] > u.v[best]) best = i;
  }
  return u.grid.point(best);
}

bool strictly_positive_core(const Field3& u) {
  const int n = u.grid.n;
  double core_min = std::numeric_limits<double>::infinity();
  for (int ix = n / 4; ix < 3 * n / 4; ++ix) {
    for (int iy = n / 4; iy < 3 * n / 4; ++iy) {
      for (int iz = n / 4; iz < 3 * n / 4; ++iz) {
        core_min = std::min(core_min, u.v[u.grid.index(ix, iy, iz)]);
      }
    }
  }
  return core_min > 0.0;
}

struct ProjectedState {
  Field3 u;
  NehariCoeffs coef;
  double energy = 0.0;
};

// The iteration minimizes the plus-part functional (attractive terms read
// u^+ only): its minimizers carry no negative part, and the field itself is
// never modified pointwise, which keeps the spectral residual clean.  A hard
// per-step clip would kink the iterate and the Gibbs ringing of the spectral
// Laplacian then swamps the Euler-Lagrange residual.
constexpr auto kPlus = NonlinearParts::PositivePart;

ProjectedState project_state(Field3 u, const MaterializedPotentials& P,
                             const CoulombKernel& kernel,
                             FunctionalWorkspace& ws) {
  NehariCoeffs c = nehari_coeffs(u, P, kernel, ws, kPlus);
  const NehariPoint p = nehari_project_scalar(c);
  for (double& x : u.v) x *= p.t;
  const double t2 = p.t * p.t;
  c.A *= t2;
  c.B *= t2 * t2;
  c.D *= t2 * t2 * t2;
  for (std::size_t i = 0; i < c.C.size(); ++i) c.C[i] *= std::pow(p.t, c.q[i]);
  return {std::move(u), std::move(c), 0.0};
}

double min_of(const Field3& u) {
  double m = u.v.empty() ? 0.0 : u.v[0];
  for (double x : u.v) m = std::min(m, x);
  return m;
}

}  // namespace

GroundState minimize_nehari(const MaterializedPotentials& P,
                            const CoulombKernel& kernel, const Field3& init,
                            const SolverConfig& cfg) {
  require_same_grid(init.grid, P.grid, "minimize_nehari");
  if (cfg.max_iters < 1) throw SolverError("minimize_nehari: max_iters < 1");
  FunctionalWorkspace ws(P.grid);

  ProjectedState st = project_state(init, P, kernel, ws);
  st.energy = ray_energy(st.coef, 1.0);

  GroundState out;
  out.max_track.push_back(max_point_of(st.u));

  double tau = cfg.tau0;
  double prev_energy = st.energy;
  bool stalled = false;
  int cleanups = 0;

  for (int it = 0; it < cfg.max_iters; ++it) {
    Field3 r = residual(st.u, P, kernel, ws, kPlus);
    const double el =
        std::sqrt(std::max(0.0, inner_product(r, r))) / std::sqrt(st.coef.A);

    out.iters.push_back({it, st.energy, el, tau});
    out.el_residual = el;

    const bool stall_ok =
        it == 0 || std::fabs(prev_energy - st.energy) <=
                       cfg.energy_stall * std::max(1.0, std::fabs(st.energy));
    if (el <= cfg.tol && stall_ok) {
      const double floor = min_of(st.u);
      if (floor >= 0.0) {
        out.converged = true;
        break;
      }
      // residual-scale negative dips: remove them and keep iterating until
      // the cleaned state itself passes the tolerance
      if (cleanups < 25 && floor > -1e-4 * linf_norm(st.u)) {
        ++cleanups;
        Field3 cleaned = st.u;
        for (double& x : cleaned.v) x = std::max(x, 0.0);
        st = project_state(std::move(cleaned), P, kernel, ws);
        st.energy = ray_energy(st.coef, 1.0);
        prev_energy = st.energy;
        continue;
      }
      break;  // persistent negativity: report unconverged
    }
    prev_energy = st.energy;

    Field3 g = cfg.sobolev_precond ? ws.box.helmholtz_inverse(r, P.V_mean) : r;
    const double slope = inner_product(g, r);

    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      Field3 trial(P.grid);
      for (std::size_t j = 0; j < trial.size(); ++j) {
        trial.v[j] = st.u.v[j] - tau * g.v[j];
      }
      try {
        ProjectedState cand = project_state(std::move(trial), P, kernel, ws);
        cand.energy = ray_energy(cand.coef, 1.0);
        if (cand.energy <= st.energy - 1e-4 * tau * slope ||
            cand.energy < st.energy) {
          st = std::move(cand);
          accepted = true;
          tau = std::min(tau * 1.3, 64.0);
          break;
        }
      } catch (const DegenerateNehariError&) {
        // the trial lost every attractive term; shrink the step
      }
      tau *= cfg.backtrack;
    }
    out.max_track.push_back(max_point_of(st.u));
    if (!accepted) {
      stalled = true;
      break;
    }
  }

  out.u = std::move(st.u);
  out.energy = st.energy;
  out.breakdown = energy_breakdown(st.coef);
  out.nehari_residual = std::fabs(nehari_f(st.coef, 1.0) - st.coef.A) / st.coef.A;
  out.max_point = max_point_of(out.u);
  out.positive = min_of(out.u) >= 0.0 && strictly_positive_core(out.u);

  if (std::sqrt(st.coef.A) < cfg.norm_floor) out.converged = false;
  if (stalled && out.el_residual > cfg.tol) out.converged = false;
  return out;
}

Field3 gaussian_seed(const Grid3& g, const Vec3& center, double width,
                     double amplitude) {
  return sample_field(g, [&](const Vec3& p) {
    const Vec3 d = p - center;
    return amplitude *
           std::exp(-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) /
                    (2.0 * width * width));
  });
}

Field3 radial_profile_seed(const Grid3& g, const Vec3& center,
                           const RadialField& profile) {
  return sample_field(g, [&](const Vec3& p) {
    return radial_interp(profile, norm(p - center));
  });
}

GroundState multistart(const PotentialSet& pot, double eps,
                       const MaterializedPotentials& P,
                       const CoulombKernel& kernel, const SolverConfig& cfg,
                       int k, const RadialConfig& rcfg,
                       const std::vector<Vec3>& seed_hints) {
  if (k < 1) throw SolverError("multistart: k must be >= 1");

  std::vector<Vec3> centers;  // original coordinates
  if (!seed_hints.empty()) {
    centers = seed_hints;
    if (int(centers.size()) > k) centers.resize(std::size_t(k));
  } else {
    // coarse ground-energy scan over the reachable parameter region
    const double B = 0.75 * eps * P.grid.L;
    std::vector<std::pair<double, Vec3>> samples;
    const int half = 2;
    for (int i = -half; i <= half; ++i) {
      for (int j = -half; j <= half; ++j) {
        for (int l = -half; l <= half; ++l) {
          const Vec3 s{B * i / half, B * j / half, B * l / half};
          try {
            RadialConfig quick = rcfg;
            quick.tol = 1e-5;
            quick.seed_widths = {1.5};
            samples.push_back({radial_ground_state(pot.frozen_at(s), quick).c, s});
          } catch (const DegenerateNehariError&) {
          }
        }
      }
    }
    std::stable_sort(samples.begin(), samples.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [c, s] : samples) {
      if (int(centers.size()) >= k) break;
      centers.push_back(s);
    }
  }
  centers.push_back(pot.x0);  // the K-maximizer seed

  // dedup and map into solver coordinates
  std::vector<Vec3> used;
  GroundState best;
  bool have = false, have_converged = false;
  int degenerate = 0;
  for (const Vec3& s : centers) {
    bool dup = false;
    for (const Vec3& t : used) dup = dup || norm(s - t) < 1e-9;
    if (dup) continue;
    used.push_back(s);

    Vec3 c = (1.0 / eps) * s;
    for (double& x : c) x = std::clamp(x, -0.85 * P.grid.L, 0.85 * P.grid.L);

    Field3 seed;
    try {
      RadialSolveResult prof = radial_ground_state(pot.frozen_at(s), rcfg);
      seed = radial_profile_seed(P.grid, c, prof.u);
    } catch (const DegenerateNehariError&) {
      seed = gaussian_seed(P.grid, c, 1.5);
    }
    try {
      GroundState run = minimize_nehari(P, kernel, seed, cfg);
      const bool better =
          !have ||
          (run.converged && !have_converged) ||
          (run.converged == have_converged && run.energy < best.energy);
      if (better) {
        best = std::move(run);
        have = true;
        have_converged = best.converged;
      }
    } catch (const DegenerateNehariError&) {
      ++degenerate;
    }
  }
  if (!have) {
    throw SolverError("multistart: all " + std::to_string(degenerate) +
                      " starts failed (degenerate seeds)");
  }
  return best;
}

}  // namespace neharisp
