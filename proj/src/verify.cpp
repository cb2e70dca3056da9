#include "neharisp/verify.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "neharisp/config.hpp"
#include "neharisp/semiclassics.hpp"

namespace neharisp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

Field3 random_bumps(const Grid3& g, std::mt19937_64& rng, int nb,
                    bool positive) {
  std::uniform_real_distribution<double> cdist(-g.L / 3.0, g.L / 3.0);
  std::uniform_real_distribution<double> wdist(0.8, 2.5);
  std::uniform_real_distribution<double> adist(0.2, 1.0);
  std::bernoulli_distribution sign(0.5);
  struct Bump {
    Vec3 c;
    double w, a;
  };
  std::vector<Bump> bumps;
  for (int k = 0; k < nb; ++k) {
    Bump b;
    b.c = {cdist(rng), cdist(rng), cdist(rng)};
    b.w = wdist(rng);
    b.a = adist(rng) * (positive || !sign(rng) ? 1.0 : -1.0);
    bumps.push_back(b);
  }
  return sample_field(g, [&](const Vec3& p) {
    double v = 0.0;
    for (const Bump& b : bumps) {
      const Vec3 d = p - b.c;
      v += b.a * std::exp(-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) /
                          (2.0 * b.w * b.w));
    }
    return v;
  });
}

PotentialSet constant_potentials() {
  PotentialSet P;
  P.V = Expr::parse("0.3");
  P.Q.push_back({Expr::parse("30"), 4.2});
  P.i0 = 1;
  P.K = Expr::parse("1");
  P.limits = {0.3, {30.0}, 1.0, 1.0};
  return P;
}

CheckResult make_result(const std::string& name, bool pass,
                        const std::string& detail, Clock::time_point t0) {
  return {name, pass, detail, seconds_since(t0)};
}

// -- criterion 1 --------------------------------------------------------------

CheckResult check_coulomb_gaussian() {
  const auto t0 = Clock::now();
  const Grid3 g(64, 12.0);
  const CoulombKernel kernel(g);
  CoulombWorkspace ws(g);

  const Field3 u = sample_field(g, [](const Vec3& p) {
    return std::exp(-0.5 * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
  });  // u^2 = exp(-|x|^2)
  const Field3 phi = coulomb_potential(u, nullptr, kernel, ws);

  double max_rel = 0.0;
  double phi_min = phi.v[0];
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const Vec3 p = g.point(i);
    const double r = norm(p);
    phi_min = std::min(phi_min, phi.v[i]);
    if (r >= g.L / 2.0) continue;
    const double exact =
        r > 1e-12 ? std::pow(kPi, 1.5) * std::erf(r) / r : 2.0 * kPi;
    max_rel = std::max(max_rel, std::fabs(phi.v[i] - exact) / exact);
  }
  const double secs = seconds_since(t0);
  const bool pass = max_rel < 1e-3 && phi_min >= 0.0 && secs < 5.0;
  return make_result("coulomb.gaussian_oracle", pass,
                     "max rel err " + fmt(max_rel) + ", min phi " +
                         fmt(phi_min) + ", " + fmt(secs) + "s",
                     t0);
}

// -- criterion 2 --------------------------------------------------------------

CheckResult check_coulomb_scalings() {
  const auto t0 = Clock::now();
  const Grid3 g(64, 12.0);
  const CoulombKernel kernel(g);
  CoulombWorkspace ws(g);
  const double S = sobolev_constant();
  std::mt19937_64 rng(20240811);

  double worst_field = 0.0, worst_energy = 0.0, worst_margin = 1e300;
  for (int trial = 0; trial < 10; ++trial) {
    const Field3 u = random_bumps(g, rng, 6, false);
    const Field3 phi = coulomb_potential(u, nullptr, kernel, ws);
    const double e1 = coulomb_energy(u, nullptr, kernel, ws);
    for (double t : {0.5, 2.0, 3.0}) {
      Field3 tu = u;
      for (double& x : tu.v) x *= t;
      const Field3 phit = coulomb_potential(tu, nullptr, kernel, ws);
      double dev = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < phi.size(); ++i) {
        dev = std::max(dev, std::fabs(phit.v[i] - t * t * phi.v[i]));
        scale = std::max(scale, std::fabs(phit.v[i]));
      }
      worst_field = std::max(worst_field, dev / scale);
      const double et = coulomb_energy(tu, nullptr, kernel, ws);
      worst_energy = std::max(
          worst_energy, std::fabs(et - t * t * t * t * e1) / std::fabs(et));
    }
    const CoulombBound b = coulomb_bound_check(u, kernel, ws, S);
    worst_margin = std::min(worst_margin, (b.rhs - b.lhs) / b.rhs);
  }
  const bool pass =
      worst_field <= 1e-10 && worst_energy <= 1e-10 && worst_margin > 0.0;
  return make_result("coulomb.scaling_laws", pass,
                     "t^2 field dev " + fmt(worst_field) + ", t^4 energy dev " +
                         fmt(worst_energy) + ", min bound margin " +
                         fmt(worst_margin),
                     t0);
}

// -- criterion 3 --------------------------------------------------------------

CheckResult check_nehari_agreement() {
  const auto t0 = Clock::now();
  const Grid3 g(64, 12.0);
  const CoulombKernel kernel(g);
  FunctionalWorkspace ws(g);
  const PotentialSet P = constant_potentials();
  const MaterializedPotentials mat = materialize(P, g, 1.0);
  std::mt19937_64 rng(777);

  double worst_agree = 0.0, worst_ray = 0.0, worst_res = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Field3 u = random_bumps(g, rng, 5, true);
    const NehariCoeffs c = nehari_coeffs(u, mat, kernel, ws);
    const NehariPoint newton = nehari_project_scalar(c);
    const NehariPoint bisect =
        nehari_project_scalar(c, NehariRootMethod::Bisection);
    worst_agree =
        std::max(worst_agree, std::fabs(newton.t - bisect.t) / newton.t);
    worst_res = std::max(worst_res,
                         std::max(newton.nehari_residual, bisect.nehari_residual));
    for (double lam : {0.5, 2.0}) {
      NehariCoeffs cl = c;
      cl.A *= lam * lam;
      cl.B *= lam * lam * lam * lam;
      cl.D *= std::pow(lam, 6.0);
      for (std::size_t i = 0; i < cl.C.size(); ++i) {
        cl.C[i] *= std::pow(lam, cl.q[i]);
      }
      const NehariPoint pl = nehari_project_scalar(cl);
      worst_ray =
          std::max(worst_ray, std::fabs(lam * pl.t - newton.t) / newton.t);
    }
  }
  const bool pass =
      worst_agree <= 1e-10 && worst_ray <= 1e-9 && worst_res <= 1e-10;
  return make_result("nehari.agreement", pass,
                     "newton/bisect dev " + fmt(worst_agree) + ", ray dev " +
                         fmt(worst_ray) + ", max residual " + fmt(worst_res),
                     t0);
}

// -- criterion 4 --------------------------------------------------------------

CheckResult check_ray_maximum() {
  const auto t0 = Clock::now();
  const Grid3 g(64, 8.0);
  const CoulombKernel kernel(g);
  FunctionalWorkspace ws(g);
  const PotentialSet P = constant_potentials();
  const MaterializedPotentials mat = materialize(P, g, 1.0);

  SolverConfig cfg;
  cfg.tol = 1e-6;
  const RadialSolveResult prof = radial_ground_state(P.frozen_at({0, 0, 0}));
  const Field3 seed = radial_profile_seed(g, {0, 0, 0}, prof.u);
  const GroundState gs = minimize_nehari(mat, kernel, seed, cfg);
  if (!gs.converged) {
    return make_result("ray.max_at_one", false, "solver did not converge", t0);
  }

  // dense grid then local refinement on the ray energy
  const NehariCoeffs c = nehari_coeffs(gs.u, mat, kernel, ws);
  double lo = 0.2, hi = 3.0;
  double best_t = 1.0;
  for (int level = 0; level < 5; ++level) {
    double best_e = -1e300;
    const int npts = 201;
    for (int i = 0; i < npts; ++i) {
      const double t = lo + (hi - lo) * i / (npts - 1);
      const double e = ray_energy(c, t);
      if (e > best_e) {
        best_e = e;
        best_t = t;
      }
    }
    const double step = (hi - lo) / (npts - 1);
    lo = best_t - 2.0 * step;
    hi = best_t + 2.0 * step;
  }
  const double dev = std::fabs(best_t - 1.0);
  const bool pass = dev <= 1e-6;
  return make_result("ray.max_at_one", pass,
                     "argmax_t I(t u*) = 1 " + std::string(pass ? "+" : "VIOLATED ") +
                         fmt(dev) + ", el res " + fmt(gs.el_residual),
                     t0);
}

// -- criterion 5 --------------------------------------------------------------

CheckResult check_radial_monotonicity() {
  const auto t0 = Clock::now();
  RadialConfig rcfg;
  rcfg.seed_widths = {1.5};
  auto level = [&](double a, double b1, double bc) {
    FrozenCoeffs c;
    c.a = a;
    c.b = {b1};
    c.q = {4.2};
    c.b_crit = bc;
    c.gamma = 1.0;
    c.i0 = 1;
    return radial_ground_state(c, rcfg).c;
  };
  const double as[3] = {0.8, 1.0, 1.2};
  const double bs[3] = {24.0, 30.0, 36.0};
  double lattice[3][3];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) lattice[i][j] = level(as[i], bs[j], 1.0);
  }
  double min_margin = 1e300;
  bool ok = true;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i + 1 < 3; ++i) {
      const double m = lattice[i + 1][j] - lattice[i][j];  // increasing in a
      min_margin = std::min(min_margin, m);
      ok = ok && m > 1e-6;
    }
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j + 1 < 3; ++j) {
      const double m = lattice[i][j] - lattice[i][j + 1];  // decreasing in b
      min_margin = std::min(min_margin, m);
      ok = ok && m > 1e-6;
    }
  }
  // critical weight sweep
  double prev = level(1.0, 30.0, 0.8);
  for (double bc : {1.0, 1.2}) {
    const double cur = level(1.0, 30.0, bc);
    const double m = prev - cur;
    min_margin = std::min(min_margin, m);
    ok = ok && m > 1e-6;
    prev = cur;
  }
  const double secs = seconds_since(t0);
  const bool pass = ok && secs < 30.0;
  return make_result("radial.monotonicity", pass,
                     "min margin " + fmt(min_margin) + ", " + fmt(secs) + "s",
                     t0);
}

// -- criterion 6 --------------------------------------------------------------

CheckResult check_sobolev_constant() {
  const auto t0 = Clock::now();
  const double talenti = 0.75 * std::pow(2.0 * kPi * kPi, 2.0 / 3.0);
  const double s1 = sobolev_constant(1.0);
  const double s2 = sobolev_constant(0.1);
  const double inv_dev = std::fabs(s1 - s2) / s1;
  const double val_dev = std::fabs(s1 - talenti) / talenti;

  // a Gaussian trial function must sit strictly above the bubble quotient
  const double gq = [] {
    auto fg = [](double r) { return r * r * r * r * std::exp(-r * r); };
    auto f6 = [](double r) { return r * r * std::exp(-3.0 * r * r); };
    double grad = 0.0, six = 0.0;
    const int n = 40001;
    const double R = 12.0, h = R / (n - 1);
    for (int i = 0; i < n; ++i) {
      const double r = i * h;
      const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      grad += w * fg(r);
      six += w * f6(r);
    }
    grad *= 4.0 * kPi * h / 3.0;
    six *= 4.0 * kPi * h / 3.0;
    return grad / std::cbrt(six);
  }();
  const bool pass = inv_dev <= 1e-8 && val_dev <= 1e-6 && gq > s1;
  return make_result("bubble.sobolev_constant", pass,
                     "S = " + fmt(s1) + ", sigma dev " + fmt(inv_dev) +
                         ", talenti dev " + fmt(val_dev) + ", gaussian quotient " +
                         fmt(gq),
                     t0);
}

// -- criterion 7 --------------------------------------------------------------

CheckResult check_bubble_slopes() {
  const auto t0 = Clock::now();
  const std::vector<double> sigmas = {0.2, 0.1, 0.05, 0.025};
  const double R = 25.0;
  const auto rows = bubble_estimates(sigmas, {0, 0, 0}, R);

  std::vector<double> ls;
  for (double s : sigmas) ls.push_back(std::log(s));
  auto slope_of = [&](auto getter) {
    std::vector<double> ys;
    for (const auto& r : rows) ys.push_back(std::log(getter(r)));
    return linear_fit(ls, ys).slope;
  };
  const double s2 = slope_of([](const BubbleRow& r) { return r.l2; });
  const double s25 = slope_of([](const BubbleRow& r) { return r.l2_5; });
  const double s4 = slope_of([](const BubbleRow& r) { return r.l4; });
  const double s5 = slope_of([](const BubbleRow& r) { return r.l5; });

  const double S32 = std::pow(sobolev_constant(), 1.5);
  std::vector<double> l6err, graderr;
  for (const auto& r : rows) {
    l6err.push_back(std::log(std::fabs(S32 - r.l6)));
    graderr.push_back(std::log(std::fabs(r.grad_sq - S32)));
  }
  const double order6 = linear_fit(ls, l6err).slope;
  const double order_grad = linear_fit(ls, graderr).slope;

  // t = 3 carries the logarithmic factor: l3 / sigma^{3/2} is affine in
  // log(1/sigma) with positive slope
  std::vector<double> lx, ly;
  for (const auto& r : rows) {
    lx.push_back(std::log(1.0 / r.sigma));
    ly.push_back(r.l3 / std::pow(r.sigma, 1.5));
  }
  const LineFit l3fit = linear_fit(lx, ly);

  bool pass = std::fabs(s2 - 1.0) <= 0.05 && std::fabs(s25 - 1.25) <= 0.05 &&
              std::fabs(s4 - 1.0) <= 0.05 && std::fabs(s5 - 0.5) <= 0.05 &&
              order6 >= 2.5 && order_grad >= 0.7 && order_grad <= 1.3 &&
              l3fit.slope > 0.0 && l3fit.r2 >= 0.98;
  for (const auto& r : rows) pass = pass && !r.cutoff_dominated;
  return make_result(
      "bubble.slopes", pass,
      "slopes t2 " + fmt(s2) + " t2.5 " + fmt(s25) + " t4 " + fmt(s4) +
          " t5 " + fmt(s5) + ", l6 order " + fmt(order6) + ", grad order " +
          fmt(order_grad) + ", t3 log-fit r2 " + fmt(l3fit.r2),
      t0);
}

// -- criterion 8 --------------------------------------------------------------

CheckResult check_critical_margins(int threads) {
  const auto t0 = Clock::now();
  std::ostringstream detail;
  bool pass = true;
  for (const std::string name : {"single_well", "competing", "nonexist_bump"}) {
    const RunConfig rc = parse_config(builtin_config(name), name);
    GmapConfig gm;
    gm.halfwidth = 2.0;
    gm.resolution = 5;
    gm.threads = threads;
    RadialConfig rcfg = rc.radial;
    rcfg.seed_widths = {1.5};
    rcfg.tol = 1e-7;
    const GroundEnergyMap map = ground_energy_map(rc.potentials, gm, rcfg);
    const CriticalLevelCheck clc = critical_level_check(map, rc.potentials);
    pass = pass && clc.holds && clc.margin > 0.0;
    detail << name << " margin " << fmt(clc.margin) << " (c0 " << fmt(map.c0)
           << " < " << fmt(clc.threshold) << "); ";
  }
  return make_result("levels.critical_margin", pass, detail.str(), t0);
}

// -- gradient consistency (criterion 12 extra) ---------------------------------

CheckResult check_gradient_consistency() {
  const auto t0 = Clock::now();
  const Grid3 g(32, 12.0);
  const CoulombKernel kernel(g);
  FunctionalWorkspace ws(g);
  PotentialSet P = constant_potentials();
  P.V = Expr::parse("1 + 0.3*exp(-0.1*(x^2 + y^2 + z^2))");
  P.limits.V_inf = 1.0;
  const MaterializedPotentials mat = materialize(P, g, 1.0);
  std::mt19937_64 rng(4242);

  double worst = 0.0;
  const Field3 u = random_bumps(g, rng, 5, true);
  const Field3 r = residual(u, mat, kernel, ws);
  for (int k = 0; k < 20; ++k) {
    const Field3 w = random_bumps(g, rng, 4, false);
    const double pairing = inner_product(r, w);
    const double delta = 3e-4 * lp_norm(u, 2.0) / std::max(lp_norm(w, 2.0), 1e-12);
    Field3 up = u, um = u;
    for (std::size_t i = 0; i < u.size(); ++i) {
      up.v[i] += delta * w.v[i];
      um.v[i] -= delta * w.v[i];
    }
    const double ep = energy(up, mat, kernel, ws).total;
    const double em = energy(um, mat, kernel, ws).total;
    const double fd = (ep - em) / (2.0 * delta);
    worst = std::max(worst, std::fabs(fd - pairing) / std::max(std::fabs(fd), 1e-12));
  }
  const bool pass = worst <= 1e-6;
  return make_result("functional.gradient_check", pass,
                     "max rel dev " + fmt(worst) + " over 20 directions", t0);
}

// -- synthetic decay fits -------------------------------------------------------

CheckResult check_decay_synthetic() {
  const auto t0 = Clock::now();
  const Grid3 g(64, 12.0);
  double worst = 0.0;
  for (double mu : {0.5, 1.0, 2.0, 4.0}) {
    const Field3 u = sample_field(g, [&](const Vec3& p) {
      return std::exp(-mu * norm(p));
    });
    const DecayFit fit = decay_fit(u, {0, 0, 0}, 1.0);
    worst = std::max(worst, std::fabs(fit.mu - mu) / mu);
  }
  const Field3 gauss = sample_field(g, [](const Vec3& p) {
    const double r = norm(p);
    return std::exp(-r * r);
  });
  const DecayFit gfit = decay_fit(gauss, {0, 0, 0}, 1.0);
  const bool pass = worst <= 1e-3 && gfit.r2 < 0.98;
  return make_result("decay.synthetic", pass,
                     "exp recovery dev " + fmt(worst) + ", gaussian r2 " +
                         fmt(gfit.r2) + " (flagged non-exponential)",
                     t0);
}

}  // namespace

std::vector<Check> verify_checks(int threads) {
  return {
      {"coulomb.gaussian_oracle", check_coulomb_gaussian},
      {"coulomb.scaling_laws", check_coulomb_scalings},
      {"nehari.agreement", check_nehari_agreement},
      {"ray.max_at_one", check_ray_maximum},
      {"radial.monotonicity", check_radial_monotonicity},
      {"bubble.sobolev_constant", check_sobolev_constant},
      {"bubble.slopes", check_bubble_slopes},
      {"levels.critical_margin", [threads] { return check_critical_margins(threads); }},
      {"functional.gradient_check", check_gradient_consistency},
      {"decay.synthetic", check_decay_synthetic},
  };
}

VerifyOutcome run_verify(const std::string& filter, int threads,
                         std::ostream& out) {
  VerifyOutcome outcome;
  for (const Check& check : verify_checks(threads)) {
    if (!filter.empty() && check.name.find(filter) == std::string::npos) {
      continue;
    }
    CheckResult r;
    try {
      r = check.fn();
    } catch (const std::exception& e) {
      r.name = check.name;
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    outcome.all_pass = outcome.all_pass && r.pass;
    out << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " (" << r.detail
        << ")\n";
    outcome.results.push_back(std::move(r));
  }
  if (outcome.results.empty()) {
    out << "no properties matched filter '" << filter << "'\n";
    outcome.all_pass = false;
  }
  return outcome;
}

}  // namespace neharisp
