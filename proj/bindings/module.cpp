#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "neharisp/config.hpp"
#include "neharisp/field_io.hpp"
#include "neharisp/semiclassics.hpp"

namespace py = pybind11;
using namespace neharisp;

namespace {

Field3 field_from_array(const Grid3& g, const py::array_t<double>& arr) {
  if (arr.ndim() != 3 || arr.shape(0) != g.n || arr.shape(1) != g.n ||
      arr.shape(2) != g.n) {
    throw py::value_error("array must have shape (n, n, n)");
  }
  Field3 f(g);
  auto r = arr.unchecked<3>();
  std::size_t at = 0;
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      for (int k = 0; k < g.n; ++k, ++at) f.v[at] = r(i, j, k);
    }
  }
  return f;
}

py::array_t<double> array_from_field(const Field3& f) {
  const int n = f.grid.n;
  py::array_t<double> out({n, n, n});
  auto w = out.mutable_unchecked<3>();
  std::size_t at = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k, ++at) w(i, j, k) = f.v[at];
    }
  }
  return out;
}

/// Box grid plus the transforms and Poisson kernel bound to it.
class Box {
 public:
  Box(int n, double L) : grid_(n, L), kernel_(grid_), ws_(grid_) {}

  int n() const { return grid_.n; }
  double L() const { return grid_.L; }
  double h() const { return grid_.h(); }

  double inner_product(const py::array_t<double>& a,
                       const py::array_t<double>& b) {
    return neharisp::inner_product(field_from_array(grid_, a),
                                   field_from_array(grid_, b));
  }
  double lp_norm(const py::array_t<double>& u, double p) {
    return neharisp::lp_norm(field_from_array(grid_, u), p);
  }
  double h1_norm_sq(const py::array_t<double>& u, const py::array_t<double>& V) {
    return neharisp::h1_norm_sq(ws_.box, field_from_array(grid_, u),
                                field_from_array(grid_, V));
  }
  double grad_sq(const py::array_t<double>& u) {
    return ws_.box.grad_sq(field_from_array(grid_, u));
  }
  py::array_t<double> coulomb_potential(const py::array_t<double>& u) {
    return array_from_field(neharisp::coulomb_potential(
        field_from_array(grid_, u), nullptr, kernel_, ws_.coulomb));
  }
  double coulomb_energy(const py::array_t<double>& u) {
    return neharisp::coulomb_energy(field_from_array(grid_, u), nullptr,
                                    kernel_, ws_.coulomb);
  }
  py::tuple coulomb_bound(const py::array_t<double>& u) {
    const CoulombBound b = coulomb_bound_check(field_from_array(grid_, u),
                                               kernel_, ws_.coulomb,
                                               sobolev_constant());
    return py::make_tuple(b.lhs, b.rhs);
  }
  py::dict decay_fit(const py::array_t<double>& u, const Vec3& center,
                     double eps) {
    const DecayFit f =
        neharisp::decay_fit(field_from_array(grid_, u), center, eps);
    py::dict d;
    d["C"] = f.C;
    d["mu"] = f.mu;
    d["r2"] = f.r2;
    return d;
  }

 private:
  Grid3 grid_;
  CoulombKernel kernel_;
  FunctionalWorkspace ws_;
};

py::dict radial_solve(double a, const std::vector<double>& b,
                      const std::vector<double>& q, int i0, double b_crit,
                      double gamma, int n_r, double r_max) {
  FrozenCoeffs c;
  c.a = a;
  c.b = b;
  c.q = q;
  c.i0 = i0;
  c.b_crit = b_crit;
  c.gamma = gamma;
  RadialConfig rcfg;
  rcfg.n_r = n_r;
  rcfg.r_max = r_max;
  const RadialSolveResult res = radial_ground_state(c, rcfg);
  py::dict out;
  out["c"] = res.c;
  out["converged"] = res.converged;
  out["el_res"] = res.el_res;
  py::array_t<double> r(res.u.grid.n_r), u(res.u.grid.n_r);
  for (int j = 0; j < res.u.grid.n_r; ++j) {
    r.mutable_at(j) = res.u.grid.r(j);
    u.mutable_at(j) = res.u.v[std::size_t(j)];
  }
  out["r"] = r;
  out["u"] = u;
  return out;
}

py::dict ground_energy_py(const std::string& config_json, const Vec3& s) {
  const RunConfig cfg = parse_config(config_json, "<python>");
  py::dict out;
  try {
    out["G"] = ground_energy(cfg.potentials, s, cfg.radial);
    out["degenerate"] = false;
  } catch (const DegenerateNehariError&) {
    out["G"] = std::numeric_limits<double>::quiet_NaN();
    out["degenerate"] = true;
  }
  return out;
}

py::dict nehari_project_py(const std::string& config_json, double eps, int n,
                           double L, const py::array_t<double>& u) {
  const RunConfig cfg = parse_config(config_json, "<python>");
  const Grid3 g(n, L);
  const CoulombKernel kernel(g);
  FunctionalWorkspace ws(g);
  const MaterializedPotentials mat = materialize(cfg.potentials, g, eps);
  const Field3 f = field_from_array(g, u);
  const NehariCoeffs c = nehari_coeffs(f, mat, kernel, ws);
  const NehariPoint p = nehari_project_scalar(c);
  py::dict out;
  out["t"] = p.t;
  out["nehari_residual"] = p.nehari_residual;
  out["energy_at_t"] = ray_energy(c, p.t);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "core operations of the nehari-sp solver";

  py::register_exception<Error>(m, "NehariSpError");

  py::class_<Box>(m, "Box")
      .def(py::init<int, double>(), py::arg("n"), py::arg("L"))
      .def_property_readonly("n", &Box::n)
      .def_property_readonly("L", &Box::L)
      .def_property_readonly("h", &Box::h)
      .def("inner_product", &Box::inner_product)
      .def("lp_norm", &Box::lp_norm)
      .def("h1_norm_sq", &Box::h1_norm_sq)
      .def("grad_sq", &Box::grad_sq)
      .def("coulomb_potential", &Box::coulomb_potential)
      .def("coulomb_energy", &Box::coulomb_energy)
      .def("coulomb_bound", &Box::coulomb_bound)
      .def("decay_fit", &Box::decay_fit, py::arg("u"), py::arg("center"),
           py::arg("eps"));

  m.def("sobolev_constant", &sobolev_constant, py::arg("sigma") = 1.0);
  m.def("bubble_estimates",
        [](const std::vector<double>& sigmas, double R) {
          py::list rows;
          for (const BubbleRow& r : bubble_estimates(sigmas, {0, 0, 0}, R)) {
            py::dict d;
            d["sigma"] = r.sigma;
            d["grad_sq"] = r.grad_sq;
            d["l6"] = r.l6;
            d["l2"] = r.l2;
            d["l2_5"] = r.l2_5;
            d["l3"] = r.l3;
            d["l4"] = r.l4;
            d["l5"] = r.l5;
            rows.append(d);
          }
          return rows;
        },
        py::arg("sigmas"), py::arg("R") = 25.0);
  m.def("radial_ground_state", &radial_solve, py::arg("a"), py::arg("b"),
        py::arg("q"), py::arg("i0") = 1, py::arg("b_crit") = 1.0,
        py::arg("gamma") = 1.0, py::arg("n_r") = 4096, py::arg("r_max") = 60.0);
  m.def("ground_energy", &ground_energy_py, py::arg("config_json"),
        py::arg("s"));
  m.def("nehari_project", &nehari_project_py, py::arg("config_json"),
        py::arg("eps"), py::arg("n"), py::arg("L"), py::arg("u"));
  m.def("builtin_config", [](const std::string& name) {
    return builtin_config(name);
  });
  m.def("write_field",
        [](const std::string& path, int n, double L,
           const py::array_t<double>& u, const std::string& name) {
          const Grid3 g(n, L);
          write_field(field_from_array(g, u), path, {name, ""});
        },
        py::arg("path"), py::arg("n"), py::arg("L"), py::arg("u"),
        py::arg("name") = "field");
  m.def("read_field", [](const std::string& path) {
    const Field3 f = read_field3(path);
    return py::make_tuple(f.grid.n, f.grid.L, array_from_field(f));
  });
}
