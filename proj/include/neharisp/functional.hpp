#pragma once

#include "neharisp/coulomb.hpp"
#include "neharisp/fft.hpp"
#include "neharisp/potentials.hpp"

namespace neharisp {

/// Quadrature coefficients of the energy along the ray {t u}:
///   I(t u) = t^2/2 A + t^4/4 B - sum_i t^{q_i}/q_i C_i - t^6/6 D
/// with A = ||u||_eps^2, B the Poisson pairing, C_i the Q_i integrals and
/// D the critical integral.  Everything downstream (energy, Nehari root,
/// coercivity) is scalar work on these numbers, shared between the 3D and
/// radial discretizations.
struct NehariCoeffs {
  double A = 0.0;
  double B = 0.0;
  std::vector<double> C;
  double D = 0.0;
  std::vector<double> q;
  int i0 = 1;
};

struct EnergyBreakdown {
  double quadratic = 0.0;
  double poisson = 0.0;
  std::vector<double> subcritical;
  double critical = 0.0;
  double total = 0.0;
};

struct NehariPoint {
  double t = 0.0;
  double nehari_residual = 0.0;  // |<I'(tu), tu>| / ||tu||_eps^2
};

enum class NehariRootMethod { SafeguardedNewton, Bisection };

// --- scalar layer -----------------------------------------------------------

/// f(t) = -t^2 B + sum t^{q_i-2} C_i + t^4 D; the projection solves f(t) = A.
double nehari_f(const NehariCoeffs& c, double t);

/// f(t) - A (negative at t = 0+, crosses zero exactly once where f > 0).
double nehari_scalar(const NehariCoeffs& c, double t);

double ray_energy(const NehariCoeffs& c, double t);

/// Unique positive root of f(t) = A.  Throws DegenerateNehariError when no
/// sign change appears below the bracketing cap (all attractive integrals
/// vanish).
NehariPoint nehari_project_scalar(
    const NehariCoeffs& c,
    NehariRootMethod method = NehariRootMethod::SafeguardedNewton);

/// I(u) - (1/2 - 1/q_{i0}) ||u||_eps^2; nonnegative on the manifold under
/// the (f2) sign pattern.
double coercivity_gap_scalar(const NehariCoeffs& c);

// --- field layer -------------------------------------------------------------

/// Evaluation context bundling the per-thread transforms.
struct FunctionalWorkspace {
  SpectralBox box;
  CoulombWorkspace coulomb;
  explicit FunctionalWorkspace(const Grid3& g) : box(g), coulomb(g) {}
};

/// How the attractive integrands read the field: |u| (the plain functional)
/// or u^+ (the plus-part functional whose minimizers have no negative part).
enum class NonlinearParts { Absolute, PositivePart };

NehariCoeffs nehari_coeffs(const Field3& u, const MaterializedPotentials& P,
                           const CoulombKernel& kernel, FunctionalWorkspace& ws,
                           NonlinearParts parts = NonlinearParts::Absolute);

EnergyBreakdown energy_breakdown(const NehariCoeffs& c);

EnergyBreakdown energy(const Field3& u, const MaterializedPotentials& P,
                       const CoulombKernel& kernel, FunctionalWorkspace& ws);

/// Euler-Lagrange defect
///   r = -Lap u + V u + h phi u - sum Q_i |u|^{q_i-2} u - K |u|^4 u,
/// phi = 1/|x| * (h u^2).
Field3 residual(const Field3& u, const MaterializedPotentials& P,
                const CoulombKernel& kernel, FunctionalWorkspace& ws,
                NonlinearParts parts = NonlinearParts::Absolute);

NehariPoint nehari_project(
    const Field3& u, const MaterializedPotentials& P,
    const CoulombKernel& kernel, FunctionalWorkspace& ws,
    NehariRootMethod method = NehariRootMethod::SafeguardedNewton);

/// Requires u to sit on the manifold (nehari residual <= 1e-8).
double coercivity_gap(const Field3& u, const MaterializedPotentials& P,
                      const CoulombKernel& kernel, FunctionalWorkspace& ws);

}  // namespace neharisp
