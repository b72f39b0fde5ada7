#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "crlab/fields/forms.hpp"
#include "crlab/geom/catalog.hpp"
#include "crlab/io/serialize.hpp"

using namespace crlab;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

Field make_field(ChartPtr ch, auto f) {
  Field out(ch);
  pointwise(out, [&](cplx& o, long long i) {
    o = f(ch->coord(std::size_t(i), 0), ch->coord(std::size_t(i), 1),
          ch->coord(std::size_t(i), 2));
  });
  return out;
}
} // namespace

TEST_CASE("fourier differentiation is exact on resolved modes") {
  auto ch = make_periodic3({16, 16, 16}, {kTwoPi, kTwoPi, kTwoPi});

  // single mode along x
  Field f = make_field(ch, [](double x, double, double) { return std::sin(x); });
  Field fx = dirderiv(f, 0);
  Field expect = make_field(ch, [](double x, double, double) { return std::cos(x); });
  CHECK(max_abs_diff(fx, expect) < 1e-12);

  // constants die along every axis
  Field c = constant<cplx>(ch, 3.25);
  for (int a = 0; a < 3; ++a) CHECK(max_abs(dirderiv(c, a)) < 1e-13);

  // complex mode e^{i(2x+3y)}, y-derivative = 3i f
  Field g = make_field(ch, [](double x, double y, double) {
    return std::polar(1.0, 2 * x + 3 * y);
  });
  Field gy = dirderiv(g, 1);
  Field gy_expect(ch);
  pointwise(gy_expect, [&](cplx& o, long long i) { o = cplx(0, 3) * g.v[i]; });
  CHECK(max_abs_diff(gy, gy_expect) < 1e-12);
}

TEST_CASE("fast spectral path matches the serial reference") {
  auto ch = make_periodic3({16, 8, 12}, {kTwoPi, 2.0, 4.0});
  Field f = random_band_limited(ch, 1234, 2);
  for (int a = 0; a < 3; ++a) {
    Field fast = dirderiv(f, a);
    Field slow(ch);
    ref::axis_deriv(*ch, a, f.v.data(), slow.v.data());
    CHECK(max_abs_diff(fast, slow) < 1e-11);
  }
  Field g = mul_raw(f, f);
  Field g2 = g;
  fft::dealias(*ch, g.v.data());
  ref::dealias(*ch, g2.v.data());
  CHECK(max_abs_diff(g, g2) < 1e-11);
}

TEST_CASE("exterior calculus: antisymmetry, d o d, Leibniz") {
  auto ch = make_periodic3({16, 16, 16}, {kTwoPi, kTwoPi, kTwoPi});

  Form dx(ch, 1), dy(ch, 1);
  dx.c[0] = constant<cplx>(ch, 1.0);
  dy.c[1] = constant<cplx>(ch, 1.0);
  Form w1 = wedge(dx, dy), w2 = wedge(dy, dx);
  CHECK(max_norm(add(w1, w2)) == 0.0);

  // random band-limited 1-form
  Form a(ch, 1), b(ch, 1);
  for (int i = 0; i < 3; ++i) {
    a.c[i] = random_band_limited(ch, 100 + i, 2);
    b.c[i] = random_band_limited(ch, 200 + i, 2);
  }
  CHECK(max_norm(exterior_d(exterior_d(a))) < 1e-10);

  Field f = random_band_limited(ch, 300, 2);
  CHECK(max_norm(exterior_d(exterior_d(fmul(f, a)))) < 1e-10);

  // Leibniz for 1-forms
  Form lhs = exterior_d(wedge(a, b));
  Form rhs = sub(wedge(exterior_d(a), b), wedge(a, exterior_d(b)));
  CHECK(max_norm(sub(lhs, rhs)) < 1e-8);
}

TEST_CASE("exterior calculus respects Heisenberg structure constants") {
  auto ch = make_invariant2(16, 16, {kTwoPi, kTwoPi}, kTwoPi);
  // d(sigma0) = sigma1 ^ sigma2
  Form s0(ch, 1);
  s0.c[0] = constant<cplx>(ch, 1.0);
  Form d = exterior_d(s0);
  CHECK(std::abs(d.comp({1, 2}).v[0] - cplx(1.0)) < 1e-14);
  CHECK(max_norm(exterior_d(d)) < 1e-12);

  Form a(ch, 1);
  for (int i = 0; i < 3; ++i) a.c[i] = random_band_limited(ch, 400 + i, 3);
  CHECK(max_norm(exterior_d(exterior_d(a))) < 1e-10);
}

TEST_CASE("quadrature") {
  auto ch = make_periodic3({16, 16, 16}, {kTwoPi, kTwoPi, kTwoPi});
  Form vol(ch, 3);
  vol.c[0] = constant<cplx>(ch, 1.0);

  // volume of the box
  CHECK(integrate(constant<cplx>(ch, 1.0), vol) ==
        doctest::Approx(kTwoPi * kTwoPi * kTwoPi).epsilon(1e-12));

  // single nonzero mode integrates to zero
  Field s = make_field(ch, [](double x, double, double) { return std::sin(x); });
  CHECK(std::abs(integrate(s, vol)) < 1e-12);

  // contact volume of the rototranslation torus: theta ^ dtheta = -n dx dy dz
  auto g = catalog_t3_roto(1, {16, 16, 16});
  Form tv = wedge(g.theta, exterior_d(g.theta));
  double v = integrate(constant<cplx>(g.chart, 1.0), tv);
  CHECK(std::abs(v) == doctest::Approx(std::pow(kTwoPi, 3)).epsilon(1e-12));
  CHECK(v < 0);  // coordinate orientation gives the negative sign
}

TEST_CASE("exterior derivative of the rototranslation contact form") {
  const int n = 2;
  auto g = catalog_t3_roto(n, {16, 16, 16});
  Form d = exterior_d(g.theta);
  // d(theta) = -n sin(nz) dz^dx + n cos(nz) dz^dy, i.e. components over
  // dx^dz and dy^dz with flipped signs
  Field sdx(g.chart), sdy(g.chart);
  pointwise(sdx, [&](cplx& o, long long i) {
    o = n * std::sin(n * g.chart->coord(std::size_t(i), 2));
  });
  pointwise(sdy, [&](cplx& o, long long i) {
    o = -n * std::cos(n * g.chart->coord(std::size_t(i), 2));
  });
  CHECK(max_abs_diff(d.comp({0, 2}), sdx) < 1e-12);
  CHECK(max_abs_diff(d.comp({1, 2}), sdy) < 1e-12);
  CHECK(max_abs(d.comp({0, 1})) < 1e-13);
}

TEST_CASE("dealiased product of band-limited fields keeps resolved content") {
  auto ch = make_periodic3({32, 32, 32}, {kTwoPi, kTwoPi, kTwoPi});
  Field a = make_field(ch, [](double x, double, double) { return std::cos(x); });
  Field b = make_field(ch, [](double, double y, double) { return std::sin(2 * y); });
  Field p = mul(a, b);
  Field expect = make_field(ch, [](double x, double y, double) {
    return std::cos(x) * std::sin(2 * y);
  });
  CHECK(max_abs_diff(p, expect) < 1e-12);
  CHECK(p.weight == a.weight + b.weight);
}

TEST_CASE("weight bookkeeping") {
  auto ch = make_periodic3({8, 8, 8}, {kTwoPi, kTwoPi, kTwoPi});
  Field a(ch, 2), b(ch, -1);
  CHECK(conjf(a).weight == -2);
  CHECK(mul(a, b).weight == 1);
}

TEST_CASE("field serialization round-trip") {
  auto dir = std::filesystem::temp_directory_path() / "crlab_test_io";
  std::filesystem::create_directories(dir);
  auto path = (dir / "f.bin").string();

  auto ch = make_periodic3({8, 8, 8}, {kTwoPi, 2.0, 1.0});
  Field f = random_band_limited(ch, 55, 2, false, 2);
  save_field(f, path);
  Field g = load_field(path);
  CHECK(g.weight == 2);
  CHECK(g.chart->axes[1].length == doctest::Approx(2.0));
  CHECK(max_abs_diff(f, g) == 0.0);
}

TEST_CASE("structure bundles write a manifest and reloadable fields") {
  auto dir = (std::filesystem::temp_directory_path() / "crlab_test_bundle").string();
  auto g = catalog_t3_roto(1, {8, 8, 8});
  auto adm = admissible_coframe(g.theta, g.theta1_raw);
  auto st = solve_structure(g.theta, adm.theta1);
  save_structure(st, dir);
  CHECK(std::filesystem::exists(dir + "/manifest.json"));
  Field a = load_field(dir + "/A11.bin");
  CHECK(a.weight == 2);
  CHECK(max_abs_diff(a, st.A11) == 0.0);
  Field w = load_field(dir + "/W.bin");
  CHECK(max_abs_diff(w, st.W) == 0.0);
}

TEST_CASE("trig interpolation at off-grid points") {
  auto ch = make_periodic3({16, 16, 16}, {kTwoPi, kTwoPi, kTwoPi});
  Field f = make_field(ch, [](double x, double y, double z) {
    return std::sin(x) * std::cos(2 * y) + std::cos(z);
  });
  std::vector<std::array<double, 4>> pts = {{0.3, 1.1, 2.7, 0}, {5.0, 0.01, 4.4, 0}};
  auto vals = eval_field_at(f, pts);
  for (size_t i = 0; i < pts.size(); ++i) {
    cplx exact = std::sin(pts[i][0]) * std::cos(2 * pts[i][1]) + std::cos(pts[i][2]);
    CHECK(std::abs(vals[i] - exact) < 1e-11);
  }
}

TEST_CASE("pointset charts refuse plain-complex differentiation") {
  auto g = catalog_heis_flat(8);
  Field f(g.chart, 0);
  CHECK_THROWS_AS((void)dirderiv(f, 0), Error);
}
