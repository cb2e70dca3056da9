#include "neharisp/functional.hpp"

#include <cmath>

namespace neharisp {

double nehari_f(const NehariCoeffs& c, double t) {
  double f = -t * t * c.B + t * t * t * t * c.D;
  for (std::size_t i = 0; i < c.C.size(); ++i) {
    f += std::pow(t, c.q[i] - 2.0) * c.C[i];
  }
  return f;
}

double nehari_scalar(const NehariCoeffs& c, double t) {
  if (!(c.A > 0.0)) throw Error("nehari_scalar: zero field (A = 0)");
  return nehari_f(c, t) - c.A;
}

double ray_energy(const NehariCoeffs& c, double t) {
  double e = 0.5 * t * t * c.A + 0.25 * t * t * t * t * c.B -
             t * t * t * t * t * t * c.D / 6.0;
  for (std::size_t i = 0; i < c.C.size(); ++i) {
    e -= std::pow(t, c.q[i]) * c.C[i] / c.q[i];
  }
  return e;
}

namespace {

double nehari_df(const NehariCoeffs& c, double t) {
  double d = -2.0 * t * c.B + 4.0 * t * t * t * c.D;
  for (std::size_t i = 0; i < c.C.size(); ++i) {
    d += (c.q[i] - 2.0) * std::pow(t, c.q[i] - 3.0) * c.C[i];
  }
  return d;
}

double projection_residual(const NehariCoeffs& c, double t) {
  // <I'(tu), tu> = t^2 (A - f(t)); normalized by ||tu||_eps^2 = t^2 A
  return std::fabs(nehari_f(c, t) - c.A) / c.A;
}

}  // namespace

NehariPoint nehari_project_scalar(const NehariCoeffs& c,
                                  NehariRootMethod method) {
  if (!(c.A > 0.0)) throw Error("nehari_project: zero field (A = 0)");

  // bracket [lo, hi] with g(lo) < 0 < g(hi), g(t) = f(t) - A
  double lo = 1e-6;
  while (nehari_scalar(c, lo) >= 0.0) lo *= 0.5;  // pathological huge B
  double hi = 1.0;
  constexpr double kCap = 1e6;
  while (nehari_scalar(c, hi) <= 0.0) {
    hi *= 2.0;
    if (hi > kCap) {
      throw DegenerateNehariError(
          "nehari_project: no sign change below t = 1e6; all attractive "
          "integrals vanish for this field");
    }
  }

  double t = 0.5 * (lo + hi);
  if (method == NehariRootMethod::Bisection) {
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      t = 0.5 * (lo + hi);
      (nehari_scalar(c, t) < 0.0 ? lo : hi) = t;
    }
    t = 0.5 * (lo + hi);
  } else {
    // Newton clipped to the bracket, bisection fallback
    for (int it = 0; it < 200; ++it) {
      const double g = nehari_scalar(c, t);
      (g < 0.0 ? lo : hi) = t;
      const double d = nehari_df(c, t);
      double next = (d != 0.0) ? t - g / d : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::fabs(next - t) <= 1e-16 * t) {
        t = next;
        break;
      }
      t = next;
      if (hi - lo <= 4e-16 * hi) break;
    }
  }

  // one extra Newton polish for the residual target
  for (int it = 0; it < 4 && projection_residual(c, t) > 1e-13; ++it) {
    const double d = nehari_df(c, t);
    if (d == 0.0) break;
    t -= nehari_scalar(c, t) / d;
  }
  return {t, projection_residual(c, t)};
}

double coercivity_gap_scalar(const NehariCoeffs& c) {
  const double qp = c.q[std::size_t(c.i0 - 1)];
  return ray_energy(c, 1.0) - (0.5 - 1.0 / qp) * c.A;
}

NehariCoeffs nehari_coeffs(const Field3& u, const MaterializedPotentials& P,
                           const CoulombKernel& kernel, FunctionalWorkspace& ws,
                           NonlinearParts parts) {
  require_same_grid(u.grid, P.grid, "nehari_coeffs");
  const bool plus = parts == NonlinearParts::PositivePart;
  NehariCoeffs c;
  c.q = P.q;
  c.i0 = P.i0;

  c.A = h1_norm_sq(ws.box, u, P.V);
  c.B = coulomb_energy(u, P.h_ptr(), kernel, ws.coulomb);

  const double vol = u.grid.cell_volume();
  c.C.resize(P.Q.size());
  for (std::size_t i = 0; i < P.Q.size(); ++i) {
    long double acc = 0.0L;
    const double qi = P.q[i];
    const Field3& Qi = P.Q[i];
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double m = plus ? std::max(u.v[j], 0.0) : std::fabs(u.v[j]);
      acc += (long double)Qi.v[j] * std::pow(m, qi);
    }
    c.C[i] = double(acc) * vol;
  }
  long double acc = 0.0L;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double m = plus ? std::max(u.v[j], 0.0) : u.v[j];
    const double u2 = m * m;
    acc += (long double)P.K.v[j] * u2 * u2 * u2;
  }
  c.D = double(acc) * vol;
  return c;
}

EnergyBreakdown energy_breakdown(const NehariCoeffs& c) {
  EnergyBreakdown e;
  e.quadratic = 0.5 * c.A;
  e.poisson = 0.25 * c.B;
  e.subcritical.resize(c.C.size());
  long double total = (long double)e.quadratic + e.poisson;
  for (std::size_t i = 0; i < c.C.size(); ++i) {
    e.subcritical[i] = -c.C[i] / c.q[i];
    total += e.subcritical[i];
  }
  e.critical = -c.D / 6.0;
  total += e.critical;
  e.total = double(total);
  return e;
}

EnergyBreakdown energy(const Field3& u, const MaterializedPotentials& P,
                       const CoulombKernel& kernel, FunctionalWorkspace& ws) {
  return energy_breakdown(nehari_coeffs(u, P, kernel, ws));
}

Field3 residual(const Field3& u, const MaterializedPotentials& P,
                const CoulombKernel& kernel, FunctionalWorkspace& ws,
                NonlinearParts parts) {
  require_same_grid(u.grid, P.grid, "residual");
  const bool plus = parts == NonlinearParts::PositivePart;
  Field3 r = ws.box.neg_laplacian(u);
  Field3 phi = coulomb_potential(u, P.h_ptr(), kernel, ws.coulomb);
  const bool weighted = P.h.has_value();
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double uv = u.v[j];
    const double hw = weighted ? P.h->v[j] : 1.0;
    double rhs = 0.0;
    if (!plus || uv > 0.0) {
      for (std::size_t i = 0; i < P.Q.size(); ++i) {
        // |u|^{q-2} u evaluated sign-safely for non-integer q
        rhs += P.Q[i].v[j] *
               std::copysign(std::pow(std::fabs(uv), P.q[i] - 1.0), uv);
      }
      const double u2 = uv * uv;
      rhs += P.K.v[j] * u2 * u2 * uv;
    }
    r.v[j] += (P.V.v[j] + hw * phi.v[j]) * uv - rhs;
  }
  return r;
}

NehariPoint nehari_project(const Field3& u, const MaterializedPotentials& P,
                           const CoulombKernel& kernel, FunctionalWorkspace& ws,
                           NehariRootMethod method) {
  return nehari_project_scalar(nehari_coeffs(u, P, kernel, ws), method);
}

double coercivity_gap(const Field3& u, const MaterializedPotentials& P,
                      const CoulombKernel& kernel, FunctionalWorkspace& ws) {
  const NehariCoeffs c = nehari_coeffs(u, P, kernel, ws);
  const double res = std::fabs(nehari_f(c, 1.0) - c.A) / c.A;
  if (res > 1e-8) {
    throw Error("coercivity_gap: field is not on the Nehari manifold "
                "(residual " + std::to_string(res) + ")");
  }
  return coercivity_gap_scalar(c);
}

}  // namespace neharisp
