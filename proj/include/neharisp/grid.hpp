#pragma once

#include <cstddef>
#include <vector>

#include "neharisp/common.hpp"

namespace neharisp {

/// Uniform periodic box [-L, L)^3 with n points per axis, origin at the center.
struct Grid3 {
  int n = 0;
  double L = 0.0;

  Grid3() = default;
  Grid3(int n_, double L_);

  double h() const { return 2.0 * L / n; }
  std::size_t npts() const {
    return static_cast<std::size_t>(n) * n * n;
  }
  double cell_volume() const { return h() * h() * h(); }
  double coord(int i) const { return -L + i * h(); }

  // row-major, z fastest
  std::size_t index(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(ix) * n + iy) * n + iz;
  }
  Vec3 point(std::size_t flat) const {
    const int iz = static_cast<int>(flat % n);
    const int iy = static_cast<int>((flat / n) % n);
    const int ix = static_cast<int>(flat / (static_cast<std::size_t>(n) * n));
    return {coord(ix), coord(iy), coord(iz)};
  }

  bool operator==(const Grid3&) const = default;
};

struct Field3 {
  Grid3 grid;
  std::vector<double> v;

  Field3() = default;
  explicit Field3(const Grid3& g) : grid(g), v(g.npts(), 0.0) {}

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
  std::size_t size() const { return v.size(); }
};

/// Uniform radial grid r_j = j*dr, j = 1..n_r, truncated at r_max; the
/// stored nodes are interior points of [0, r_max] so both ends carry
/// Dirichlet data for the reduced 1D problems.
struct RadialGrid {
  int n_r = 0;
  double r_max = 0.0;

  RadialGrid() = default;
  RadialGrid(int n_r_, double r_max_);

  double dr() const { return r_max / (n_r + 1); }
  double r(int j) const { return (j + 1) * dr(); }

  bool operator==(const RadialGrid&) const = default;
};

struct RadialField {
  RadialGrid grid;
  std::vector<double> v;

  RadialField() = default;
  explicit RadialField(const RadialGrid& g) : grid(g), v(g.n_r, 0.0) {}
};

void require_same_grid(const Grid3& a, const Grid3& b, const char* op);

/// Midpoint-rule L2 pairing  sum a_i b_i h^3.
double inner_product(const Field3& a, const Field3& b);

/// |u|_p with p in [1, inf); midpoint quadrature.
double lp_norm(const Field3& u, double p);

double linf_norm(const Field3& u);

/// sum f_i h^3 for an arbitrary per-point integrand supplied as a field.
double integrate(const Field3& f);

/// 4*pi * sum f_j r_j^2 dr  (radial midpoint quadrature of a radial integrand).
double radial_integrate(const RadialField& f);

Field3 make_field(const Grid3& g, double (*f)(const Vec3&));

template <typename F>
Field3 sample_field(const Grid3& g, F&& f) {
  Field3 out(g);
  std::size_t at = 0;
  for (int ix = 0; ix < g.n; ++ix) {
    const double x = g.coord(ix);
    for (int iy = 0; iy < g.n; ++iy) {
      const double y = g.coord(iy);
      for (int iz = 0; iz < g.n; ++iz, ++at) {
        out.v[at] = f(Vec3{x, y, g.coord(iz)});
      }
    }
  }
  return out;
}

}  // namespace neharisp
