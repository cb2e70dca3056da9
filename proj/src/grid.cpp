#include "neharisp/grid.hpp"

#include <cmath>

namespace neharisp {

namespace {
// Hard cap on field allocation; a 256^3 box plus its doubled Poisson
// scratch stays well inside a few GB.
constexpr std::size_t kMaxPoints = std::size_t(256) * 256 * 256;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

Grid3::Grid3(int n_, double L_) : n(n_), L(L_) {
  if (n < 16 || !power_of_two(n)) {
    throw Error("Grid3: n must be a power of two >= 16, got " + std::to_string(n));
  }
  if (!(L > 0.0)) {
    throw Error("Grid3: box half-width L must be positive");
  }
  if (npts() > kMaxPoints) {
    throw Error("Grid3: n^3 exceeds the memory budget");
  }
}

RadialGrid::RadialGrid(int n_r_, double r_max_) : n_r(n_r_), r_max(r_max_) {
  if (n_r < 8) throw Error("RadialGrid: n_r must be >= 8");
  if (!(r_max >= 50.0)) {
    throw Error("RadialGrid: r_max must be >= 50 (dimensionless units)");
  }
}

void require_same_grid(const Grid3& a, const Grid3& b, const char* op) {
  if (!(a == b)) {
    throw GridMismatchError(std::string(op) + ": fields live on different grids");
  }
}

double inner_product(const Field3& a, const Field3& b) {
  require_same_grid(a.grid, b.grid, "inner_product");
  long double acc = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (long double)a.v[i] * b.v[i];
  return double(acc) * a.grid.cell_volume();
}

double lp_norm(const Field3& u, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw Error("lp_norm: p must lie in [1, inf)");
  }
  long double acc = 0.0L;
  for (double x : u.v) acc += std::pow((long double)std::fabs(x), (long double)p);
  return std::pow(double(acc) * u.grid.cell_volume(), 1.0 / p);
}

double linf_norm(const Field3& u) {
  double m = 0.0;
  for (double x : u.v) m = std::max(m, std::fabs(x));
  return m;
}

double integrate(const Field3& f) {
  long double acc = 0.0L;
  for (double x : f.v) acc += x;
  return double(acc) * f.grid.cell_volume();
}

double radial_integrate(const RadialField& f) {
  const double dr = f.grid.dr();
  long double acc = 0.0L;
  for (int j = 0; j < f.grid.n_r; ++j) {
    const double r = f.grid.r(j);
    acc += (long double)f.v[j] * r * r;
  }
  return 4.0 * kPi * double(acc) * dr;
}

Field3 make_field(const Grid3& g, double (*f)(const Vec3&)) {
  return sample_field(g, f);
}

}  // namespace neharisp
