#include "neharisp/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace neharisp {

using nlohmann::json;

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw ConfigError("config field " + field + ": " + what);
}

const json& need(const json& j, const std::string& parent, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) bad(parent + "/" + key, "missing");
  return *it;
}

double need_num(const json& j, const std::string& parent, const char* key) {
  const json& v = need(j, parent, key);
  if (!v.is_number()) bad(parent + "/" + key, "must be a number");
  return v.get<double>();
}

int need_int(const json& j, const std::string& parent, const char* key) {
  const json& v = need(j, parent, key);
  if (!v.is_number_integer()) bad(parent + "/" + key, "must be an integer");
  return v.get<int>();
}

std::string need_str(const json& j, const std::string& parent, const char* key) {
  const json& v = need(j, parent, key);
  if (!v.is_string()) bad(parent + "/" + key, "must be a string");
  return v.get<std::string>();
}

Expr parse_expr_field(const json& v, const std::string& field) {
  if (!v.is_string()) bad(field, "must be an expression string");
  try {
    return Expr::parse(v.get<std::string>());
  } catch (const ExprError& e) {
    bad(field, e.what());
  }
}

Vec3 need_vec3(const json& j, const std::string& parent, const char* key) {
  const json& v = need(j, parent, key);
  if (!v.is_array() || v.size() != 3) bad(parent + "/" + key, "must be [x, y, z]");
  Vec3 out;
  for (int k = 0; k < 3; ++k) {
    if (!v[std::size_t(k)].is_number()) bad(parent + "/" + key, "must be numeric");
    out[std::size_t(k)] = v[std::size_t(k)].get<double>();
  }
  return out;
}

int line_of_offset(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": JSON parse error near line " +
                      std::to_string(line_of_offset(text, e.byte)) + ": " +
                      e.what());
  }
  RunConfig cfg;
  cfg.config_hash = fnv1a_hex(text);

  const json& grid = need(j, "", "grid");
  try {
    cfg.grid = Grid3(need_int(grid, "/grid", "n"), need_num(grid, "/grid", "L"));
  } catch (const Error& e) {
    bad("/grid", e.what());
  }

  if (j.contains("radial")) {
    const json& rad = j["radial"];
    cfg.radial.n_r = need_int(rad, "/radial", "n_r");
    cfg.radial.r_max = need_num(rad, "/radial", "r_max");
    try {
      RadialGrid check(cfg.radial.n_r, cfg.radial.r_max);
    } catch (const Error& e) {
      bad("/radial", e.what());
    }
  }

  const json& pot = need(j, "", "potentials");
  PotentialSet& P = cfg.potentials;
  P.V = parse_expr_field(need(pot, "/potentials", "V"), "/potentials/V");
  const json& qarr = need(pot, "/potentials", "Q");
  if (!qarr.is_array() || qarr.empty()) bad("/potentials/Q", "must be a nonempty array");
  for (std::size_t i = 0; i < qarr.size(); ++i) {
    const std::string at = "/potentials/Q/" + std::to_string(i);
    const json& qi = qarr[i];
    QTerm term;
    term.expr = parse_expr_field(need(qi, at, "expr"), at + "/expr");
    term.q = need_num(qi, at, "q");
    P.Q.push_back(std::move(term));
  }
  P.i0 = need_int(pot, "/potentials", "i0");
  P.K = parse_expr_field(need(pot, "/potentials", "K"), "/potentials/K");
  if (pot.contains("h")) {
    P.h = parse_expr_field(pot["h"], "/potentials/h");
  }
  if (pot.contains("x0")) P.x0 = need_vec3(pot, "/potentials", "x0");

  const json& lim = need(pot, "/potentials", "limits");
  P.limits.V_inf = need_num(lim, "/potentials/limits", "V_inf");
  const json& qinf = need(lim, "/potentials/limits", "Q_inf");
  if (!qinf.is_array()) bad("/potentials/limits/Q_inf", "must be an array");
  for (const json& v : qinf) {
    if (!v.is_number()) bad("/potentials/limits/Q_inf", "must be numeric");
    P.limits.Q_inf.push_back(v.get<double>());
  }
  P.limits.K_inf = need_num(lim, "/potentials/limits", "K_inf");
  P.limits.h_inf = lim.contains("h_inf") ? need_num(lim, "/potentials/limits", "h_inf") : 1.0;

  try {
    validate_potentials(P);
  } catch (const Error& e) {
    bad("/potentials", e.what());
  }

  if (j.contains("solver")) {
    const json& s = j["solver"];
    if (s.contains("tol")) cfg.solver.tol = need_num(s, "/solver", "tol");
    if (s.contains("energy_stall"))
      cfg.solver.energy_stall = need_num(s, "/solver", "energy_stall");
    if (s.contains("max_iters"))
      cfg.solver.max_iters = need_int(s, "/solver", "max_iters");
    if (s.contains("restarts"))
      cfg.solver.restarts = need_int(s, "/solver", "restarts");
    if (s.contains("tau0")) cfg.solver.tau0 = need_num(s, "/solver", "tau0");
    if (s.contains("backtrack"))
      cfg.solver.backtrack = need_num(s, "/solver", "backtrack");
    if (s.contains("precond")) {
      const std::string p = need_str(s, "/solver", "precond");
      if (p == "sobolev") cfg.solver.sobolev_precond = true;
      else if (p == "identity") cfg.solver.sobolev_precond = false;
      else bad("/solver/precond", "must be 'sobolev' or 'identity'");
    }
    if (!(cfg.solver.tol > 0.0) || !(cfg.solver.energy_stall > 0.0))
      bad("/solver", "tolerances must be positive");
    if (cfg.solver.max_iters < 1) bad("/solver/max_iters", "must be >= 1");
    if (cfg.solver.restarts < 1) bad("/solver/restarts", "must be >= 1");
  }

  if (j.contains("scan")) {
    const json& s = j["scan"];
    const json& eps = need(s, "/scan", "eps_list");
    if (!eps.is_array()) bad("/scan/eps_list", "must be an array");
    for (const json& v : eps) {
      if (!v.is_number()) bad("/scan/eps_list", "must be numeric");
      cfg.eps_list.push_back(v.get<double>());
    }
    for (std::size_t i = 0; i < cfg.eps_list.size(); ++i) {
      if (!(cfg.eps_list[i] > 0.0)) bad("/scan/eps_list", "entries must be positive");
      if (i > 0 && !(cfg.eps_list[i] < cfg.eps_list[i - 1]))
        bad("/scan/eps_list", "entries must be strictly decreasing");
    }
  }

  if (j.contains("gmap")) {
    const json& g = j["gmap"];
    if (g.contains("center")) cfg.gmap.center = need_vec3(g, "/gmap", "center");
    cfg.gmap.halfwidth = need_num(g, "/gmap", "box");
    cfg.gmap.resolution = need_int(g, "/gmap", "resolution");
    if (cfg.gmap.resolution < 1) bad("/gmap/resolution", "must be >= 1");
    if (!(cfg.gmap.halfwidth >= 0.0)) bad("/gmap/box", "must be >= 0");
    if (g.contains("set_tol")) cfg.gmap.set_tol = need_num(g, "/gmap", "set_tol");
  }

  if (j.contains("output")) {
    cfg.output_dir = need_str(j["output"], "/output", "dir");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

namespace {

const std::map<std::string, std::string>& builtin_table() {
  static const std::map<std::string, std::string> table = {
      {"single_well", R"json({
  "grid": {"n": 64, "L": 8.0},
  "radial": {"n_r": 4096, "r_max": 60.0},
  "potentials": {
    "V": "0.5 - 0.3*exp(-(x^2 + y^2 + z^2))",
    "Q": [{"expr": "30", "q": 4.2}],
    "i0": 1,
    "K": "1",
    "x0": [0.0, 0.0, 0.0],
    "limits": {"V_inf": 0.5, "Q_inf": [30.0], "K_inf": 1.0, "h_inf": 1.0}
  },
  "solver": {"tol": 1e-6, "max_iters": 500, "restarts": 2},
  "scan": {"eps_list": [1.0, 0.5, 0.25, 0.125]},
  "gmap": {"center": [0.0, 0.0, 0.0], "box": 2.0, "resolution": 7},
  "output": {"dir": "out/single_well"}
})json"},
      {"competing", R"json({
  "grid": {"n": 64, "L": 8.0},
  "radial": {"n_r": 4096, "r_max": 60.0},
  "potentials": {
    "V": "0.3 - 0.1*exp(-((x - 0.5)^2 + y^2 + z^2))",
    "Q": [
      {"expr": "-2 - 0.5*exp(-(x^2 + y^2 + z^2))", "q": 4.1},
      {"expr": "20*tanh(x)", "q": 4.2},
      {"expr": "5 + 3*exp(-(x^2 + y^2 + z^2))", "q": 4.4}
    ],
    "i0": 2,
    "K": "0.5 - 0.125*exp(-(x^2 + y^2 + z^2))*(1 - exp(-((x - 1.5)^2 + y^2 + z^2)))",
    "x0": [1.5, 0.0, 0.0],
    "limits": {"V_inf": 0.3, "Q_inf": [-2.0, 20.0, 5.0], "K_inf": 0.5, "h_inf": 1.0}
  },
  "solver": {"tol": 1e-6, "max_iters": 500, "restarts": 2},
  "scan": {"eps_list": [1.0, 0.5, 0.25]},
  "gmap": {"center": [0.0, 0.0, 0.0], "box": 2.0, "resolution": 5},
  "output": {"dir": "out/competing"}
})json"},
      {"nonexist_bump", R"json({
  "grid": {"n": 64, "L": 8.0},
  "radial": {"n_r": 4096, "r_max": 60.0},
  "potentials": {
    "V": "0.2 + 0.1*exp(-2*(x^2 + y^2 + z^2))",
    "Q": [{"expr": "30 - 5*exp(-2*(x^2 + y^2 + z^2))", "q": 4.2}],
    "i0": 1,
    "K": "1",
    "x0": [0.0, 0.0, 0.0],
    "limits": {"V_inf": 0.2, "Q_inf": [30.0], "K_inf": 1.0, "h_inf": 1.0}
  },
  "solver": {"tol": 1e-6, "max_iters": 500, "restarts": 2},
  "scan": {"eps_list": [0.5, 0.25]},
  "gmap": {"center": [0.0, 0.0, 0.0], "box": 3.0, "resolution": 7},
  "output": {"dir": "out/nonexist_bump"}
})json"},
      {"h1_well", R"json({
  "grid": {"n": 64, "L": 8.0},
  "radial": {"n_r": 4096, "r_max": 60.0},
  "potentials": {
    "V": "0.5 - 0.3*exp(-(x^2 + y^2 + z^2))",
    "Q": [{"expr": "30", "q": 4.2}],
    "i0": 1,
    "K": "1",
    "h": "(x^2 + y^2 + z^2) * exp(-(x^2 + y^2 + z^2))",
    "x0": [0.0, 0.0, 0.0],
    "limits": {"V_inf": 0.5, "Q_inf": [30.0], "K_inf": 1.0, "h_inf": 0.0}
  },
  "solver": {"tol": 1e-6, "max_iters": 500, "restarts": 2},
  "scan": {"eps_list": [1.0, 0.5, 0.25, 0.125]},
  "gmap": {"center": [0.0, 0.0, 0.0], "box": 2.0, "resolution": 5},
  "output": {"dir": "out/h1_well"}
})json"}};
  return table;
}

}  // namespace

const std::string& builtin_config(const std::string& name) {
  const auto& table = builtin_table();
  auto it = table.find(name);
  if (it == table.end()) {
    throw ConfigError("unknown builtin config '" + name + "'");
  }
  return it->second;
}

std::vector<std::string> builtin_config_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : builtin_table()) names.push_back(k);
  return names;
}

}  // namespace neharisp
