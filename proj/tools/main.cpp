#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "neharisp/config.hpp"
#include "neharisp/field_io.hpp"
#include "neharisp/threads.hpp"
#include "neharisp/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace neharisp;

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

struct SolveArtifacts {
  GroundState gs;
  double eps;
};

void persist_state(const fs::path& dir, const std::string& stem,
                   const GroundState& gs, double eps, const RunConfig& cfg) {
  FieldFileMeta meta;
  meta.name = stem;
  meta.config_hash = cfg.config_hash;
  write_field(gs.u, (dir / (stem + ".field")).string(), meta);

  json e;
  e["config_hash"] = cfg.config_hash;
  e["eps"] = eps;
  e["energy"] = gs.energy;
  e["converged"] = gs.converged;
  e["el_residual"] = gs.el_residual;
  e["nehari_residual"] = gs.nehari_residual;
  e["positive"] = gs.positive;
  e["max_point"] = {gs.max_point[0], gs.max_point[1], gs.max_point[2]};
  e["breakdown"] = {{"quadratic", gs.breakdown.quadratic},
                    {"poisson", gs.breakdown.poisson},
                    {"subcritical", gs.breakdown.subcritical},
                    {"critical", gs.breakdown.critical},
                    {"total", gs.breakdown.total}};
  write_text(dir / (stem + "_energy.json"), e.dump(2) + "\n");

  std::string csv = "# config_hash=" + cfg.config_hash + "\n";
  csv += "# iter energy el_residual step\n";
  for (const IterRow& row : gs.iters) {
    csv += std::to_string(row.iter) + " " + g17(row.energy) + " " +
           g17(row.el_res) + " " + g17(row.step) + "\n";
  }
  write_text(dir / (stem + "_iters.csv"), csv);
}

double pick_eps(const RunConfig& cfg, double flag_eps) {
  if (flag_eps > 0.0) return flag_eps;
  if (!cfg.eps_list.empty()) return cfg.eps_list.back();
  return 1.0;
}

GroundEnergyMap run_gmap(const RunConfig& cfg, int threads) {
  GmapConfig gm = cfg.gmap;
  gm.threads = threads;
  RadialConfig rcfg = cfg.radial;
  rcfg.seed_widths = {1.5};
  rcfg.tol = 1e-7;
  return ground_energy_map(cfg.potentials, gm, rcfg);
}

void persist_gmap(const fs::path& dir, const RunConfig& cfg,
                  const GroundEnergyMap& map) {
  std::string csv = "# config_hash=" + cfg.config_hash + "\n";
  csv += "# sx sy sz G degenerate_flag\n";
  for (const GmapSample& s : map.samples) {
    csv += g17(s.s[0]) + " " + g17(s.s[1]) + " " + g17(s.s[2]) + " " +
           g17(s.G) + " " + std::to_string(int(s.degenerate)) + "\n";
  }
  write_text(dir / "gmap.csv", csv);

  json v;
  v["config_hash"] = cfg.config_hash;
  v["c0"] = map.c0;
  v["c_inf"] = map.c_inf;
  v["existence_verdict"] = map.existence_verdict;
  v["flat"] = map.flat;
  json mins = json::array();
  for (const Vec3& s : map.minimizers) mins.push_back({s[0], s[1], s[2]});
  v["minimizers"] = mins;
  const CriticalLevelCheck clc = critical_level_check(map, cfg.potentials);
  v["critical_level"] = {{"holds", clc.holds},
                         {"margin", clc.margin},
                         {"threshold", clc.threshold}};
  write_text(dir / "verdict.json", v.dump(2) + "\n");
}

int cmd_solve(const RunConfig& cfg, double flag_eps, const fs::path& dir) {
  const double eps = pick_eps(cfg, flag_eps);
  const MaterializedPotentials mat = materialize(cfg.potentials, cfg.grid, eps);
  const CoulombKernel kernel(cfg.grid);
  RadialConfig rcfg = cfg.radial;
  const GroundState gs = multistart(cfg.potentials, eps, mat, kernel,
                                    cfg.solver, cfg.solver.restarts, rcfg);
  persist_state(dir, "ground_state", gs, eps, cfg);
  std::cout << "eps " << eps << ": energy " << g17(gs.energy)
            << (gs.converged ? " (converged)" : " (NOT converged)") << "\n";
  return gs.converged ? 0 : 2;
}

int cmd_gmap(const RunConfig& cfg, int threads, const fs::path& dir) {
  const GroundEnergyMap map = run_gmap(cfg, threads);
  persist_gmap(dir, cfg, map);
  std::cout << "c0 " << g17(map.c0) << ", c_inf " << g17(map.c_inf)
            << ", existence verdict "
            << (map.existence_verdict ? "true" : "false") << "\n";
  return 0;
}

int cmd_scan(const RunConfig& cfg, bool force, int threads,
             const fs::path& dir) {
  if (cfg.eps_list.empty()) {
    throw ConfigError("scan: config declares no /scan/eps_list");
  }
  const GroundEnergyMap map = run_gmap(cfg, threads);
  persist_gmap(dir, cfg, map);
  if (!map.existence_verdict && !force) {
    throw ConfigError(
        "scan: existence verdict is false (c_inf <= c0); pass --force to "
        "scan anyway");
  }
  ScanConfig scfg;
  scfg.solver = cfg.solver;
  scfg.radial = cfg.radial;
  scfg.threads = threads;
  const ScanResult res = epsilon_scan(cfg.potentials, cfg.eps_list, cfg.grid,
                                      map, scfg);

  std::string csv = "# config_hash=" + cfg.config_hash + "\n";
  csv += "# eps c_eps xeps_x xeps_y xeps_z dist_to_G profile_err mu C fit_q\n";
  for (const ConcentrationReport& r : res.reports) {
    csv += g17(r.eps) + " " + g17(r.c_eps) + " " + g17(r.x_eps[0]) + " " +
           g17(r.x_eps[1]) + " " + g17(r.x_eps[2]) + " " + g17(r.dist_to_G) +
           " " + g17(r.profile_err) + " " + g17(r.mu) + " " + g17(r.C) + " " +
           g17(r.fit_q) + "\n";
  }
  write_text(dir / "scan.csv", csv);

  for (std::size_t i = 0; i < res.states.size(); ++i) {
    char stem[64];
    std::snprintf(stem, sizeof(stem), "state_eps_%g", res.reports[i].eps);
    persist_state(dir, stem, res.states[i], res.reports[i].eps, cfg);
  }

  json t;
  t["config_hash"] = cfg.config_hash;
  t["c_lower"] = res.trends.c_lower;
  t["floor_ok"] = res.trends.floor_ok;
  t["ceiling_ok"] = res.trends.ceiling_ok;
  t["dist_ok"] = res.trends.dist_ok;
  t["profile_ok"] = res.trends.profile_ok;
  write_text(dir / "scan_trends.json", t.dump(2) + "\n");

  bool all_converged = true;
  for (const auto& r : res.reports) all_converged = all_converged && r.converged;
  std::cout << res.reports.size() << " scan rows written to "
            << (dir / "scan.csv") << "\n";
  return all_converged ? 0 : 2;
}

int cmd_bubble(const RunConfig& cfg, const fs::path& dir) {
  const std::vector<double> sigmas = {0.2, 0.1, 0.05, 0.025};
  const auto rows = bubble_estimates(sigmas, cfg.potentials.x0, 25.0);
  std::string csv = "# config_hash=" + cfg.config_hash + "\n";
  csv += "# sigma grad_sq l6 l2 l2.5 l3 l4 l5\n";
  for (const BubbleRow& r : rows) {
    csv += g17(r.sigma) + " " + g17(r.grad_sq) + " " + g17(r.l6) + " " +
           g17(r.l2) + " " + g17(r.l2_5) + " " + g17(r.l3) + " " + g17(r.l4) +
           " " + g17(r.l5) + "\n";
  }
  write_text(dir / "bubbles.csv", csv);
  std::cout << "bubble table written to " << (dir / "bubbles.csv") << "\n";
  return 0;
}

int cmd_nonexist(const RunConfig& cfg, double flag_eps, const fs::path& dir) {
  const double eps = pick_eps(cfg, flag_eps);
  const NonexistReport rep = nonexistence_probe(cfg.potentials, eps, cfg.grid,
                                                cfg.solver, cfg.radial);
  json v;
  v["config_hash"] = cfg.config_hash;
  v["eps"] = eps;
  v["c_eps"] = rep.c_eps;
  v["c_inf"] = rep.c_inf;
  v["rel_gap"] = rep.rel_gap;
  v["runaway"] = {{"drift", rep.runaway.drift},
                  {"plateau", rep.runaway.plateau},
                  {"fired", rep.runaway.fired()}};
  write_text(dir / "nonexist.json", v.dump(2) + "\n");
  std::cout << "c_eps " << g17(rep.c_eps) << " vs c_inf " << g17(rep.c_inf)
            << " (rel gap " << g17(rep.rel_gap) << "), runaway "
            << (rep.runaway.fired() ? "fired" : "quiet") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational solver and verification suite for the rescaled "
               "critical Schrodinger-Poisson system"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  int threads_flag = 0;
  double eps_flag = 0.0;
  bool force = false;
  std::string filter;

  app.add_option("--config", config_path, "configuration JSON path");
  app.add_option("--out", out_override, "output directory override");
  app.add_option("--threads", threads_flag,
                 "worker threads (fallback: NEHARI_SP_THREADS, then hardware)");

  CLI::App* solve = app.add_subcommand("solve", "compute one ground state");
  solve->add_option("--eps", eps_flag, "semiclassical parameter");
  CLI::App* gmap = app.add_subcommand("gmap", "sample the ground-energy landscape");
  CLI::App* scan = app.add_subcommand("scan", "eps scan with concentration diagnostics");
  scan->add_flag("--force", force, "scan even when the existence verdict is false");
  CLI::App* verify = app.add_subcommand("verify", "run the property suite");
  verify->add_option("--filter", filter, "only properties whose name contains this");
  CLI::App* bubble = app.add_subcommand("bubble", "cutoff-bubble integral table");
  CLI::App* nonexist = app.add_subcommand("nonexist", "nonexistence probe");
  nonexist->add_option("--eps", eps_flag, "semiclassical parameter");

  CLI11_PARSE(app, argc, argv);
  const int threads = resolve_thread_count(threads_flag);

  try {
    if (verify->parsed()) {
      const VerifyOutcome outcome = run_verify(filter, threads, std::cout);
      return outcome.all_pass ? 0 : 3;
    }
    if (config_path.empty()) {
      std::cerr << "error: --config is required for this subcommand\n";
      return 1;
    }
    const RunConfig cfg = load_config(config_path);
    const fs::path dir = out_override.empty() ? fs::path(cfg.output_dir)
                                              : fs::path(out_override);
    fs::create_directories(dir);

    if (solve->parsed()) return cmd_solve(cfg, eps_flag, dir);
    if (gmap->parsed()) return cmd_gmap(cfg, threads, dir);
    if (scan->parsed()) return cmd_scan(cfg, force, threads, dir);
    if (bubble->parsed()) return cmd_bubble(cfg, dir);
    if (nonexist->parsed()) return cmd_nonexist(cfg, eps_flag, dir);
    std::cerr << "error: unknown subcommand\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
