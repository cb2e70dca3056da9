#pragma once

#include <optional>
#include <vector>

#include "neharisp/expr.hpp"
#include "neharisp/grid.hpp"

namespace neharisp {

struct QTerm {
  Expr expr;
  double q = 0.0;  // exponent in (4, 6)
};

struct PotentialLimits {
  double V_inf = 0.0;
  std::vector<double> Q_inf;
  double K_inf = 0.0;
  double h_inf = 1.0;
};

/// Coefficients of an autonomous (constant-coefficient) problem:
///   -Laplacian u + gamma*phi_u u + a u = sum_i b_i |u|^{q_i-2} u + b_crit |u|^4 u
struct FrozenCoeffs {
  double a = 1.0;
  std::vector<double> b;
  double b_crit = 1.0;
  double gamma = 1.0;  // Poisson coupling, h^2 at the frozen point
  std::vector<double> q;
  int i0 = 1;  // 1-based pivot
};

/// V, Q_1..Q_m (exponents q_i, pivot i0), K, h, and declared limits.
struct PotentialSet {
  Expr V;
  std::vector<QTerm> Q;
  int i0 = 1;
  Expr K;
  std::optional<Expr> h;  // absent = the constant 1
  PotentialLimits limits;
  Vec3 x0 = {0.0, 0.0, 0.0};  // point where K attains K_inf

  int m() const { return int(Q.size()); }

  double h_at(const Vec3& p) const { return h ? h->eval(p) : 1.0; }

  FrozenCoeffs frozen_at(const Vec3& s) const;
  FrozenCoeffs frozen_limit() const;
};

/// Sampling lattice for the validators: (2k+1)^3 points on [-B, B]^3.
struct SampleBox {
  double B = 16.0;
  int k = 12;
};

/// Structural checks (exponent order and range, pivot, limit sizes) plus
/// the sampled hypotheses: inf V > 0, the Q sign pattern away from the
/// pivot, 0 <= K <= K_inf with equality at the declared x0, and h either
/// strictly positive with limit h_inf > 0 or nonnegative vanishing at
/// infinity (h_inf = 0).  Violations are hard errors naming the condition.
void validate_potentials(const PotentialSet& P, const SampleBox& box = {});

/// Decay hypotheses of the nonexistence regime: V >= V_inf = inf V and
/// Q_i <= Q_i_inf on the sample box.
void validate_nonexistence_hypotheses(const PotentialSet& P,
                                      const SampleBox& box = {});

/// Potentials evaluated at eps * x on a fixed grid.
struct MaterializedPotentials {
  Grid3 grid;
  double eps = 1.0;
  Field3 V;
  std::vector<Field3> Q;
  std::vector<double> q;
  int i0 = 1;
  Field3 K;
  std::optional<Field3> h;
  double V_mean = 0.0;

  const Field3* h_ptr() const { return h ? &*h : nullptr; }
};

MaterializedPotentials materialize(const PotentialSet& P, const Grid3& g,
                                   double eps);

/// sup of K over the sample box and the declared limit (|K|_inf of the
/// critical-level threshold).
double k_sup(const PotentialSet& P, const SampleBox& box = {});
double v_inf_sample(const PotentialSet& P, const SampleBox& box = {});

}  // namespace neharisp
