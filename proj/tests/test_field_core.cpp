#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "doctest.h"
#include "neharisp/fft.hpp"
#include "neharisp/field_io.hpp"
#include "neharisp/grid.hpp"

using namespace neharisp;

namespace {

Field3 gaussian(const Grid3& g, double alpha) {
  return sample_field(g, [alpha](const Vec3& p) {
    return std::exp(-alpha * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
  });
}

Field3 random_field(const Grid3& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field3 f(g);
  for (double& x : f.v) x = dist(rng);
  return f;
}

}  // namespace

TEST_SUITE_BEGIN("field_core");

TEST_CASE("grid invariants") {
  CHECK_THROWS_AS(Grid3(8, 4.0), Error);    // too small
  CHECK_THROWS_AS(Grid3(48, 4.0), Error);   // not a power of two
  CHECK_THROWS_AS(Grid3(64, 0.0), Error);   // empty box
  CHECK_THROWS_AS(Grid3(512, 4.0), Error);  // memory budget
  const Grid3 g(16, 4.0);
  CHECK(g.h() == doctest::Approx(0.5));
  CHECK(g.npts() == 4096);
  CHECK_THROWS_AS(RadialGrid(100, 20.0), Error);  // r_max too small
}

TEST_CASE("inner product trivials and gaussian oracle") {
  const Grid3 g(64, 8.0);
  Field3 zero(g);
  Field3 one(g);
  for (double& x : one.v) x = 1.0;
  const Field3 b = random_field(g, 1);
  CHECK(inner_product(zero, b) == 0.0);
  const double vbox = std::pow(2.0 * g.L, 3.0);
  CHECK(inner_product(one, one) == doctest::Approx(vbox).epsilon(1e-14));

  const Field3 a = gaussian(g, 0.5);  // a*a = exp(-|x|^2)
  const double exact = std::pow(kPi, 1.5);
  CHECK(std::fabs(inner_product(a, a) - exact) / exact < 1e-6);

  const Grid3 g2(32, 8.0);
  CHECK_THROWS_AS(inner_product(Field3(g), Field3(g2)), GridMismatchError);
}

TEST_CASE("quadrature refinement order on the gaussian") {
  const double exact = std::pow(kPi, 1.5);
  auto err_at = [&](int n) {
    const Grid3 g(n, 8.0);
    const Field3 a = gaussian(g, 0.5);
    return std::fabs(inner_product(a, a) - exact);
  };
  const double coarse = err_at(16);
  const double fine = err_at(32);
  CHECK(fine < coarse);
  const double order = std::log2(coarse / fine);
  CHECK(order >= 2.0);
}

TEST_CASE("h1 norm: single spectral mode and scaling") {
  const Grid3 g(32, 6.0);
  SpectralBox box(g);
  Field3 u = sample_field(g, [&](const Vec3& p) {
    return std::sin(kPi * p[0] / g.L);
  });
  Field3 V(g);
  for (double& x : V.v) x = 1.0;

  CHECK(h1_norm_sq(box, Field3(g), V) == doctest::Approx(0.0));

  const double l2sq = inner_product(u, u);
  const double expected = (kPi / g.L) * (kPi / g.L) * l2sq + l2sq;
  CHECK(h1_norm_sq(box, u, V) == doctest::Approx(expected).epsilon(1e-12));

  Field3 tu = u;
  for (double& x : tu.v) x *= 3.0;
  CHECK(h1_norm_sq(box, tu, V) ==
        doctest::Approx(9.0 * h1_norm_sq(box, u, V)).epsilon(1e-12));

  Field3 badV(g);  // zero potential violates the positivity contract
  CHECK_THROWS_AS(h1_norm_sq(box, u, badV), PotentialError);
}

TEST_CASE("lp norms: homogeneity, triangle, gaussian L6 oracle") {
  const Grid3 g(64, 8.0);
  const Field3 u = gaussian(g, 1.0);
  const double exact = std::pow(kPi / 6.0, 0.25);
  CHECK(std::fabs(lp_norm(u, 6.0) - exact) / exact < 1e-5);

  CHECK(lp_norm(Field3(g), 3.0) == 0.0);
  CHECK_THROWS_AS(lp_norm(u, 0.5), Error);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> tdist(-3.0, 3.0);
  std::uniform_real_distribution<double> pdist(1.0, 6.0);
  for (int trial = 0; trial < 5; ++trial) {
    const Field3 a = random_field(g, 100 + unsigned(trial));
    const Field3 b = random_field(g, 200 + unsigned(trial));
    const double t = tdist(rng);
    const double p = pdist(rng);
    Field3 ta = a;
    for (double& x : ta.v) x *= t;
    CHECK(lp_norm(ta, p) ==
          doctest::Approx(std::fabs(t) * lp_norm(a, p)).epsilon(1e-12));
    Field3 sum = a;
    for (std::size_t i = 0; i < sum.size(); ++i) sum.v[i] += b.v[i];
    CHECK(lp_norm(sum, p) <= lp_norm(a, p) + lp_norm(b, p) + 1e-12);
  }
}

TEST_CASE("spectral parseval: multiplier sum equals the physical route") {
  const Grid3 g(32, 5.0);
  SpectralBox box(g);
  const Field3 u = random_field(g, 42);
  const double via_multiplier = box.grad_sq(u);
  // physical-space route: transform back with the Laplacian applied and pair
  const double via_physical = inner_product(u, box.neg_laplacian(u));
  CHECK(std::fabs(via_multiplier - via_physical) / via_multiplier < 1e-10);

  // on a band-limited field (no Nyquist content) the componentwise gradient
  // agrees as well
  Field3 smooth = sample_field(g, [&](const Vec3& p) {
    return std::sin(2.0 * kPi * p[0] / g.L) * std::cos(4.0 * kPi * p[1] / g.L) +
           std::cos(2.0 * kPi * p[2] / g.L);
  });
  double via_gradient = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    const Field3 d = box.derivative(smooth, axis);
    via_gradient += inner_product(d, d);
  }
  CHECK(std::fabs(box.grad_sq(smooth) - via_gradient) / via_gradient < 1e-10);
}

TEST_CASE("field file round trip is bit exact") {
  const Grid3 g(16, 4.0);
  Field3 f = random_field(g, 9);
  const std::string path = "roundtrip.field";
  write_field(f, path, {"test-field", "deadbeef"});
  const Field3 back = read_field3(path);
  REQUIRE(back.grid == g);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(back.v[i] == f.v[i]);

  RadialGrid rg(128, 60.0);
  RadialField rf(rg);
  for (int j = 0; j < rg.n_r; ++j) rf.v[std::size_t(j)] = std::exp(-rg.r(j));
  write_field(rf, "roundtrip_radial.field");
  const RadialField rback = read_radial_field("roundtrip_radial.field");
  REQUIRE(rback.grid == rg);
  for (int j = 0; j < rg.n_r; ++j) {
    CHECK(rback.v[std::size_t(j)] == rf.v[std::size_t(j)]);
  }
  std::remove(path.c_str());
  std::remove("roundtrip_radial.field");
}

TEST_CASE("field file malformed inputs") {
  {
    std::ofstream out("bad_empty.field", std::ios::binary);
  }
  CHECK_THROWS_AS(read_field("bad_empty.field"), IoError);

  {
    std::ofstream out("bad_schema.field", std::ios::binary);
    out << R"({"schema":"other/9","kind":"field3","n":16,"L":4.0})" << "\n";
  }
  CHECK_THROWS_AS(read_field("bad_schema.field"), IoError);

  {
    // header promises a 16^3 box but carries a radial-sized payload
    std::ofstream out("bad_len.field", std::ios::binary);
    out << R"({"schema":"nehari-sp/1","kind":"field3","n":16,"L":4.0,"name":"x"})"
        << "\n";
    std::vector<double> too_short(128, 1.0);
    out.write(reinterpret_cast<const char*>(too_short.data()),
              std::streamsize(too_short.size() * 8));
  }
  CHECK_THROWS_AS(read_field("bad_len.field"), IoError);

  {
    std::ofstream out("bad_long.field", std::ios::binary);
    out << R"({"schema":"nehari-sp/1","kind":"radial","n_r":8,"r_max":60.0,"name":"x"})"
        << "\n";
    std::vector<double> too_long(9, 1.0);
    out.write(reinterpret_cast<const char*>(too_long.data()),
              std::streamsize(too_long.size() * 8));
  }
  CHECK_THROWS_AS(read_field("bad_long.field"), IoError);

  const Grid3 g(16, 4.0);
  Field3 f(g);
  f.v[0] = std::nan("");
  CHECK_THROWS_AS(write_field(f, "bad_nan.field"), IoError);

  std::remove("bad_empty.field");
  std::remove("bad_schema.field");
  std::remove("bad_len.field");
  std::remove("bad_long.field");
}

TEST_SUITE_END();
