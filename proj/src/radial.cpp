#include "neharisp/radial.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace neharisp {

std::mutex& fftw_planner_mutex();

namespace {

void check_coeffs(const FrozenCoeffs& c) {
  if (!(c.a > 0.0)) {
    throw PotentialError("radial solver: frozen a = V(s) must be positive");
  }
  if (c.gamma < 0.0) {
    throw PotentialError("radial solver: Poisson weight gamma must be >= 0");
  }
  if (c.b_crit < -1e-12) {
    throw PotentialError("radial solver: critical weight must be >= 0");
  }
  if (c.b.size() != c.q.size() || c.i0 < 1 || c.i0 > int(c.b.size())) {
    throw PotentialError("radial solver: malformed coefficient set");
  }
  for (int j = 1; j <= int(c.b.size()); ++j) {
    if (j == c.i0) continue;
    if ((j - c.i0) * c.b[std::size_t(j - 1)] < -1e-12) {
      throw PotentialError("radial solver: sign pattern violated for b_" +
                           std::to_string(j));
    }
  }
}

/// State in w = r u on the interior nodes; see RadialGrid for the layout.
struct RadialProblem {
  RadialGrid grid;
  FrozenCoeffs coeffs;
  std::vector<double> r, r_pow_q;  // r^{2-q_i} packed per term

  RadialProblem(const RadialGrid& g, const FrozenCoeffs& c)
      : grid(g), coeffs(c) {
    const int n = g.n_r;
    r.resize(n);
    for (int j = 0; j < n; ++j) r[j] = g.r(j);
    r_pow_q.resize(std::size_t(n) * c.q.size());
    for (std::size_t i = 0; i < c.q.size(); ++i) {
      for (int j = 0; j < n; ++j) {
        r_pow_q[i * std::size_t(n) + j] = std::pow(r[j], 2.0 - c.q[i]);
      }
    }
  }

  // phi_j = 4*pi * sum_k w_k^2 dr / max(r_j, r_k)
  void coulomb(const std::vector<double>& w, std::vector<double>& phi) const {
    const int n = grid.n_r;
    const double dr = grid.dr();
    phi.resize(n);
    long double inner = 0.0L, outer = 0.0L;
    for (int j = 0; j < n; ++j) outer += (long double)w[j] * w[j] / r[j];
    for (int j = 0; j < n; ++j) {
      const long double m = (long double)w[j] * w[j];
      inner += m;
      outer -= m / r[j];
      phi[j] = 4.0 * kPi * dr * (double(inner) / r[j] + double(outer));
    }
  }

  NehariCoeffs ray_coeffs(const std::vector<double>& w,
                          std::vector<double>& phi) const {
    const int n = grid.n_r;
    const double dr = grid.dr();
    NehariCoeffs c;
    c.q = coeffs.q;
    c.i0 = coeffs.i0;

    long double kin = (long double)w[0] * w[0];  // segment from r = 0
    for (int j = 0; j + 1 < n; ++j) {
      const long double d = w[j + 1] - w[j];
      kin += d * d;
    }
    kin += (long double)w[n - 1] * w[n - 1];  // segment to r_max
    long double mass = 0.0L;
    for (int j = 0; j < n; ++j) mass += (long double)w[j] * w[j];
    c.A = 4.0 * kPi * (double(kin) / dr + coeffs.a * double(mass) * dr);

    coulomb(w, phi);
    long double pois = 0.0L;
    for (int j = 0; j < n; ++j) pois += (long double)phi[j] * w[j] * w[j];
    c.B = coeffs.gamma * 4.0 * kPi * double(pois) * dr;

    c.C.resize(coeffs.b.size());
    for (std::size_t i = 0; i < coeffs.b.size(); ++i) {
      long double acc = 0.0L;
      const double* rp = &r_pow_q[i * std::size_t(n)];
      const double qi = coeffs.q[i];
      for (int j = 0; j < n; ++j) {
        acc += (long double)std::pow(std::fabs(w[j]), qi) * rp[j];
      }
      c.C[i] = coeffs.b[i] * 4.0 * kPi * double(acc) * dr;
    }
    long double crit = 0.0L;
    for (int j = 0; j < n; ++j) {
      const double w2 = w[j] * w[j];
      const double r2 = r[j] * r[j];
      crit += (long double)(w2 * w2 * w2) / (r2 * r2);
    }
    c.D = coeffs.b_crit * 4.0 * kPi * double(crit) * dr;
    return c;
  }

  // gradient density: res_j = [A_fd w]_j + a w_j + gamma phi_j w_j - rhs_j
  void residual(const std::vector<double>& w, const std::vector<double>& phi,
                std::vector<double>& res) const {
    const int n = grid.n_r;
    const double dr2 = grid.dr() * grid.dr();
    res.resize(n);
    for (int j = 0; j < n; ++j) {
      const double wl = j > 0 ? w[j - 1] : 0.0;
      const double wr = j + 1 < n ? w[j + 1] : 0.0;
      double v = (2.0 * w[j] - wl - wr) / dr2 + coeffs.a * w[j] +
                 coeffs.gamma * phi[j] * w[j];
      double rhs = 0.0;
      for (std::size_t i = 0; i < coeffs.b.size(); ++i) {
        rhs += coeffs.b[i] * r_pow_q[i * std::size_t(n) + j] *
               std::copysign(std::pow(std::fabs(w[j]), coeffs.q[i] - 1.0), w[j]);
      }
      const double w2 = w[j] * w[j];
      const double r2 = r[j] * r[j];
      rhs += coeffs.b_crit * w2 * w2 * w[j] / (r2 * r2);
      res[j] = v - rhs;
    }
  }
};

/// DST-I workspace: exact inverse of the finite-difference (-d^2/dr^2 + a).
class SineSolver {
 public:
  SineSolver(int n, double dr) : n_(n), dr_(dr) {
    buf_ = fftw_alloc_real(std::size_t(n));
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      plan_ = fftw_plan_r2r_1d(n, buf_, buf_, FFTW_RODFT00, FFTW_ESTIMATE);
    }
    eig_.resize(n);
    for (int k = 0; k < n; ++k) {
      const double s = std::sin(0.5 * kPi * (k + 1) / (n + 1));
      eig_[k] = 4.0 * s * s / (dr * dr);
    }
  }
  ~SineSolver() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(buf_);
  }

  void apply_inverse(const std::vector<double>& in, double shift,
                     std::vector<double>& out) {
    std::copy(in.begin(), in.end(), buf_);
    fftw_execute(plan_);
    const double norm = 1.0 / (2.0 * (n_ + 1));
    for (int k = 0; k < n_; ++k) buf_[k] *= norm / (eig_[k] + shift);
    fftw_execute(plan_);
    out.assign(buf_, buf_ + n_);
  }

 private:
  int n_;
  double dr_;
  double* buf_;
  fftw_plan plan_;
  std::vector<double> eig_;
};

struct SingleRun {
  std::vector<double> w;
  double c = 0.0;
  double el_res = 0.0;
  double neh_res = 0.0;
  bool converged = false;
};

SingleRun descend(const RadialProblem& prob, SineSolver& sine,
                  std::vector<double> w, const RadialConfig& cfg) {
  const int n = prob.grid.n_r;
  const double dr = prob.grid.dr();
  std::vector<double> phi, res, g, trial;

  auto project = [&](std::vector<double>& v) -> NehariCoeffs {
    NehariCoeffs c = prob.ray_coeffs(v, phi);
    const NehariPoint p = nehari_project_scalar(c);
    for (double& x : v) x *= p.t;
    // coefficients scale exactly along the ray
    const double t2 = p.t * p.t;
    c.A *= t2;
    c.B *= t2 * t2;
    c.D *= t2 * t2 * t2;
    for (std::size_t i = 0; i < c.C.size(); ++i) {
      c.C[i] *= std::pow(p.t, c.q[i]);
    }
    return c;
  };

  NehariCoeffs coef = project(w);
  double energy = ray_energy(coef, 1.0);
  double tau = 1.0;
  SingleRun run;

  for (int it = 0; it < cfg.max_iters; ++it) {
    prob.coulomb(w, phi);
    prob.residual(w, phi, res);
    long double rn = 0.0L;
    for (double x : res) rn += (long double)x * x;
    const double el = std::sqrt(4.0 * kPi * double(rn) * dr) / std::sqrt(coef.A);

    if (el <= cfg.tol) {
      run.converged = true;
      run.el_res = el;
      break;
    }
    run.el_res = el;

    sine.apply_inverse(res, prob.coeffs.a, g);
    long double descent = 0.0L;
    for (int j = 0; j < n; ++j) descent += (long double)g[j] * res[j];
    const double slope = 4.0 * kPi * double(descent) * dr;

    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      trial = w;
      bool nonzero = false;
      for (int j = 0; j < n; ++j) {
        trial[j] = std::max(0.0, trial[j] - tau * g[j]);
        nonzero = nonzero || trial[j] != 0.0;
      }
      if (!nonzero) {
        tau *= cfg.backtrack;
        continue;
      }
      try {
        std::vector<double> cand = trial;
        const NehariCoeffs cc = project(cand);
        const double en = ray_energy(cc, 1.0);
        if (en <= energy - 1e-4 * tau * slope || en < energy) {
          w = std::move(cand);
          coef = cc;
          energy = en;
          accepted = true;
          tau = std::min(tau * 1.5, 1e3);
          break;
        }
      } catch (const DegenerateNehariError&) {
        // clipped iterate left the admissible cone; shrink
      }
      tau *= cfg.backtrack;
    }
    if (!accepted) break;  // stalled
  }

  run.w = std::move(w);
  run.c = energy;
  run.neh_res = std::fabs(nehari_f(coef, 1.0) - coef.A) / coef.A;
  return run;
}

}  // namespace

RadialSolveResult radial_ground_state(const FrozenCoeffs& coeffs,
                                      const RadialConfig& cfg) {
  check_coeffs(coeffs);
  RadialGrid grid(cfg.n_r, cfg.r_max);
  RadialProblem prob(grid, coeffs);
  SineSolver sine(grid.n_r, grid.dr());

  SingleRun best;
  bool have = false;
  bool multimodal = false;
  int degenerate = 0;
  for (double width : cfg.seed_widths) {
    std::vector<double> w(std::size_t(grid.n_r));
    for (int j = 0; j < grid.n_r; ++j) {
      const double r = grid.r(j);
      w[j] = r * std::exp(-r * r / (2.0 * width * width));
    }
    try {
      SingleRun run = descend(prob, sine, std::move(w), cfg);
      if (have && std::fabs(run.c - best.c) > 1e-4) multimodal = true;
      const bool better =
          !have || (run.converged && !best.converged) ||
          (run.converged == best.converged && run.c < best.c);
      if (better) {
        best = std::move(run);
        have = true;
      }
    } catch (const DegenerateNehariError&) {
      ++degenerate;
    }
  }
  if (!have) {
    throw DegenerateNehariError(
        "radial_ground_state: every restart was Nehari-degenerate "
        "(no attractive term)");
  }

  RadialSolveResult out;
  out.u = RadialField(grid);
  for (int j = 0; j < grid.n_r; ++j) out.u.v[j] = best.w[j] / grid.r(j);
  out.c = best.c;
  out.el_res = best.el_res;
  out.nehari_residual = best.neh_res;
  out.converged = best.converged;
  out.multimodal = multimodal;
  return out;
}

NehariCoeffs radial_nehari_coeffs(const RadialField& u,
                                  const FrozenCoeffs& coeffs) {
  RadialProblem prob(u.grid, coeffs);
  std::vector<double> w(std::size_t(u.grid.n_r)), phi;
  for (int j = 0; j < u.grid.n_r; ++j) w[j] = u.v[j] * u.grid.r(j);
  return prob.ray_coeffs(w, phi);
}

EnergyBreakdown radial_energy(const RadialField& u, const FrozenCoeffs& coeffs) {
  return energy_breakdown(radial_nehari_coeffs(u, coeffs));
}

double radial_interp(const RadialField& u, double r) {
  if (r >= u.grid.r_max || r < 0.0) return 0.0;
  const double dr = u.grid.dr();
  // nodes at (j+1)*dr; linear through (0, even extension of the first node)
  const double s = r / dr - 1.0;
  if (s <= 0.0) return u.v[0];  // flat core: u'(0) = 0
  const int j = int(s);
  if (j + 1 >= u.grid.n_r) {
    const double t = s - j;
    return (1.0 - t) * u.v[std::size_t(u.grid.n_r - 1)];
  }
  const double t = s - j;
  return (1.0 - t) * u.v[std::size_t(j)] + t * u.v[std::size_t(j) + 1];
}

}  // namespace neharisp
