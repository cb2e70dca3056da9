#include "neharisp/potentials.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace neharisp {

namespace {

void for_each_sample(const SampleBox& box,
                     const std::function<void(const Vec3&)>& fn) {
  const int k = box.k;
  for (int i = -k; i <= k; ++i) {
    for (int j = -k; j <= k; ++j) {
      for (int l = -k; l <= k; ++l) {
        fn(Vec3{box.B * i / k, box.B * j / k, box.B * l / k});
      }
    }
  }
}

std::string pt(const Vec3& p) {
  std::ostringstream os;
  os << "(" << p[0] << ", " << p[1] << ", " << p[2] << ")";
  return os.str();
}

void check_structure(const PotentialSet& P) {
  if (P.Q.empty()) throw PotentialError("potentials: need at least one Q term");
  double prev = 4.0;
  for (std::size_t i = 0; i < P.Q.size(); ++i) {
    const double q = P.Q[i].q;
    if (!(q > 4.0 && q < 6.0)) {
      throw PotentialError("potentials: exponent q_" + std::to_string(i + 1) +
                           " = " + std::to_string(q) + " outside (4, 6)");
    }
    if (!(q > prev)) {
      throw PotentialError("potentials: exponents must be strictly increasing");
    }
    prev = q;
  }
  if (P.i0 < 1 || P.i0 > P.m()) {
    throw PotentialError("potentials: pivot i0 outside 1..m");
  }
  if (int(P.limits.Q_inf.size()) != P.m()) {
    throw PotentialError("potentials: limits.Q_inf size != m");
  }
}

}  // namespace

FrozenCoeffs PotentialSet::frozen_at(const Vec3& s) const {
  FrozenCoeffs c;
  c.a = V.eval(s);
  c.b.reserve(Q.size());
  c.q.reserve(Q.size());
  for (const QTerm& t : Q) {
    c.b.push_back(t.expr.eval(s));
    c.q.push_back(t.q);
  }
  c.b_crit = K.eval(s);
  const double hs = h_at(s);
  c.gamma = hs * hs;
  c.i0 = i0;
  return c;
}

FrozenCoeffs PotentialSet::frozen_limit() const {
  FrozenCoeffs c;
  c.a = limits.V_inf;
  c.b = limits.Q_inf;
  c.b_crit = limits.K_inf;
  c.gamma = limits.h_inf * limits.h_inf;
  for (const QTerm& t : Q) c.q.push_back(t.q);
  c.i0 = i0;
  return c;
}

void validate_potentials(const PotentialSet& P, const SampleBox& box) {
  check_structure(P);
  constexpr double tol = 1e-12;

  double v_min = std::numeric_limits<double>::infinity();
  double k_max = -std::numeric_limits<double>::infinity();
  double h_min = std::numeric_limits<double>::infinity();

  for_each_sample(box, [&](const Vec3& p) {
    const double v = P.V.eval(p);
    v_min = std::min(v_min, v);
    if (!std::isfinite(v)) throw PotentialError("V not finite at " + pt(p));

    for (int i = 1; i <= P.m(); ++i) {
      if (i == P.i0) continue;
      const double qi = P.Q[std::size_t(i - 1)].expr.eval(p);
      if ((i - P.i0) * qi < -tol) {
        throw PotentialError("sign pattern (f2) violated: (i-i0)*Q_i < 0 for i=" +
                             std::to_string(i) + " at " + pt(p));
      }
    }

    const double kk = P.K.eval(p);
    if (kk < -tol) throw PotentialError("K < 0 at " + pt(p) + " ((f4))");
    if (kk > P.limits.K_inf + 1e-9 * std::max(1.0, std::fabs(P.limits.K_inf))) {
      throw PotentialError("K exceeds its declared limit K_inf at " + pt(p) +
                           " ((f4))");
    }
    k_max = std::max(k_max, kk);

    if (P.h) {
      const double hh = P.h->eval(p);
      h_min = std::min(h_min, hh);
      if (P.limits.h_inf > 0.0) {
        if (!(hh > 0.0)) {
          throw PotentialError("h must be strictly positive under (H), h(" +
                               pt(p) + ") = " + std::to_string(hh));
        }
      } else if (hh < -tol) {
        throw PotentialError("h must be nonnegative under (H1) at " + pt(p));
      }
    }
  });

  if (!(v_min > 0.0)) {
    throw PotentialError("inf V = " + std::to_string(v_min) +
                         " is not positive ((f3))");
  }
  const double k_at_x0 = P.K.eval(P.x0);
  if (std::fabs(k_at_x0 - P.limits.K_inf) >
      1e-8 * std::max(1.0, std::fabs(P.limits.K_inf))) {
    throw PotentialError("K(x0) = " + std::to_string(k_at_x0) +
                         " does not attain K_inf = " +
                         std::to_string(P.limits.K_inf) + " ((f4))");
  }
  if (!(P.limits.V_inf > 0.0)) {
    throw PotentialError("declared V_inf must be positive");
  }
}

void validate_nonexistence_hypotheses(const PotentialSet& P,
                                      const SampleBox& box) {
  validate_potentials(P, box);
  constexpr double tol = 1e-9;
  double v_min = std::numeric_limits<double>::infinity();
  for_each_sample(box, [&](const Vec3& p) {
    const double v = P.V.eval(p);
    v_min = std::min(v_min, v);
    if (v < P.limits.V_inf - tol) {
      throw PotentialError("(f5) violated: V(" + pt(p) + ") = " +
                           std::to_string(v) + " dips below V_inf");
    }
    for (int i = 0; i < P.m(); ++i) {
      const double qi = P.Q[std::size_t(i)].expr.eval(p);
      if (qi > P.limits.Q_inf[std::size_t(i)] + tol) {
        throw PotentialError("(f5) violated: Q_" + std::to_string(i + 1) +
                             " exceeds its limit at " + pt(p));
      }
    }
  });
  if (std::fabs(v_min - P.limits.V_inf) > 1e-6 * std::max(1.0, P.limits.V_inf)) {
    throw PotentialError("(f5) needs inf V = V_inf; sampled inf V = " +
                         std::to_string(v_min));
  }
  if (P.h && P.limits.h_inf != 0.0) {
    bool constant_one = true;
    for_each_sample(box, [&](const Vec3& p) {
      if (std::fabs(P.h->eval(p) - 1.0) > 1e-12) constant_one = false;
    });
    if (!constant_one) {
      throw PotentialError("(f5) requires h == 1 or h satisfying (H1)");
    }
  }
}

MaterializedPotentials materialize(const PotentialSet& P, const Grid3& g,
                                   double eps) {
  if (!(eps > 0.0)) throw PotentialError("materialize: eps must be positive");
  check_structure(P);
  MaterializedPotentials M;
  M.grid = g;
  M.eps = eps;
  auto scaled = [&](const Expr& e) {
    return sample_field(g, [&](const Vec3& p) {
      return e.eval(eps * p[0], eps * p[1], eps * p[2]);
    });
  };
  M.V = scaled(P.V);
  double v_min = M.V.v[0];
  long double v_acc = 0.0L;
  for (double v : M.V.v) {
    v_min = std::min(v_min, v);
    v_acc += v;
  }
  if (!(v_min > 0.0)) {
    throw PotentialError("materialize: nonpositive V detected on the grid");
  }
  M.V_mean = double(v_acc / (long double)M.V.size());
  for (const QTerm& t : P.Q) {
    M.Q.push_back(scaled(t.expr));
    M.q.push_back(t.q);
  }
  M.i0 = P.i0;
  M.K = scaled(P.K);
  for (double kk : M.K.v) {
    if (kk < -1e-12) {
      throw PotentialError("materialize: K < 0 on the grid ((f4))");
    }
  }
  if (P.h) M.h = scaled(*P.h);
  return M;
}

double k_sup(const PotentialSet& P, const SampleBox& box) {
  double m = P.limits.K_inf;
  for_each_sample(box, [&](const Vec3& p) { m = std::max(m, P.K.eval(p)); });
  return m;
}

double v_inf_sample(const PotentialSet& P, const SampleBox& box) {
  double m = std::numeric_limits<double>::infinity();
  for_each_sample(box, [&](const Vec3& p) { m = std::min(m, P.V.eval(p)); });
  return m;
}

}  // namespace neharisp
