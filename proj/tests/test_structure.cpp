#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crlab/geom/catalog.hpp"
#include "crlab/geom/identities.hpp"

using namespace crlab;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

Structure solved_roto(int n, int res = 16) {
  auto g = catalog_t3_roto(n, {res, res, res});
  auto adm = admissible_coframe(g.theta, g.theta1_raw);
  return solve_structure(g.theta, adm.theta1);
}

JetStructure solved_heis(int npts = 24, int order = 6) {
  auto g = catalog_heis_flat(npts, order);
  auto adm = admissible_coframe(g.theta, g.theta1_raw);
  return solve_structure(g.theta, adm.theta1);
}
} // namespace

TEST_CASE("admissible coframe scales: rototranslation torus") {
  auto g = catalog_t3_roto(2, {16, 16, 16});
  auto adm = admissible_coframe(g.theta, g.theta1_raw);
  // hand value sqrt(n/2)
  Field expect = constant<cplx>(g.chart, std::sqrt(1.0));
  CHECK(max_abs_diff(adm.factor, expect) < 1e-12);
  // normalization residual after the rescale
  auto st = solve_structure(g.theta, adm.theta1);
  CHECK(st.res.normalization < 1e-12);
  // already-normalized input comes back unchanged
  auto again = admissible_coframe(g.theta, adm.theta1);
  CHECK(max_abs_diff(again.factor, constant<cplx>(g.chart, 1.0)) < 1e-12);
}

TEST_CASE("admissible coframe scales: flat Heisenberg") {
  auto g = catalog_heis_flat(16);
  auto adm = admissible_coframe(g.theta, g.theta1_raw);
  for (auto& j : adm.factor.v)
    CHECK(std::abs(j.value() - 1.0 / std::sqrt(2.0)) < 1e-13);
}

TEST_CASE("admissible coframe rejects bad input") {
  auto g = catalog_t3_roto(1, {16, 16, 16});
  // a raw coframe with a theta-direction component does not annihilate T
  Form bad = g.theta1_raw;
  bad.c[0] = add(bad.c[0], constant<cplx>(g.chart, 0.5));
  CHECK_THROWS_AS((void)admissible_coframe(g.theta, bad), Error);
}

TEST_CASE("flat Heisenberg structure: everything vanishes") {
  auto st = solved_heis();
  CHECK(max_abs(st.A11) < 1e-12);
  CHECK(max_abs(st.W) < 1e-12);
  CHECK(max_norm(st.omega) < 1e-12);
  CHECK(st.res.normalization < 1e-12);
  CHECK(st.res.structure_eq < 1e-12);
}

TEST_CASE("rototranslation torus structure matches the moving-frame values") {
  for (int n : {1, 2}) {
    auto st = solved_roto(n);
    // |A11| = n/2, W = n/2, omega = -(i n/2) theta
    Field absA(st.chart);
    pointwise(absA, [&](cplx& o, long long i) { o = std::abs(st.A11.v[i]); });
    CHECK(max_abs_diff(absA, constant<cplx>(st.chart, n / 2.0)) < 1e-10);
    CHECK(max_abs_diff(st.W, constant<cplx>(st.chart, n / 2.0)) < 1e-10);
    Form expect = fmul(constant<cplx>(st.chart, cplx(0, -n / 2.0)), st.theta);
    CHECK(max_norm(sub(st.omega, expect)) < 1e-10);
    CHECK(st.res.structure_eq < 1e-10);
    CHECK(st.res.curvature_eq < 1e-9);
    CHECK(st.res.imW < 1e-10);
    CHECK(st.res.omega_reality < 1e-10);
    // A11 = conj(c01b) with c01b = i n/2, so A11 = -i n/2 in this frame
    CHECK(max_abs_diff(st.A11, constant<cplx>(st.chart, cplx(0, -n / 2.0), 2)) < 1e-10);
  }
}

TEST_CASE("omega is anti-hermitian by construction") {
  auto st = solved_roto(1, 16);
  CHECK(max_norm(add(st.omega, conjform(st.omega))) < 1e-12);
}

TEST_CASE("covariant derivatives on the rototranslation torus") {
  const int n = 2;
  auto st = solved_roto(n);
  // A constant in the frame: A,1b = 0 and A,0 = i n A
  Field a1b = covariant_derivative(st, st.A11, CovDir::d1bar);
  CHECK(max_abs(a1b) < 1e-10);
  CHECK(a1b.weight == 1);
  Field a0 = covariant_derivative(st, st.A11, CovDir::d0);
  Field expect = scale(st.A11, cplx(0, double(n)));
  CHECK(max_abs_diff(a0, expect) < 1e-10);
  CHECK(a0.weight == 2);
  CHECK(covariant_derivative(st, st.A11, CovDir::d1).weight == 3);
}

TEST_CASE("conjugation symmetry of covariant derivatives") {
  auto st = solved_roto(1);
  Field f = random_band_limited(st.chart, 42, 3, true);  // real, weight 0
  Field f1 = covariant_derivative(st, f, CovDir::d1);
  Field f1b = covariant_derivative(st, f, CovDir::d1bar);
  CHECK(max_abs_diff(f1b, conjf(f1)) < 1e-11);
}

TEST_CASE("flat frame derivative is the plain frame derivative") {
  auto g = catalog_heis_flat(12, 6);
  auto adm = admissible_coframe(g.theta, g.theta1_raw);
  auto st = solve_structure(g.theta, adm.theta1);
  // f = e^{i(x+y)}
  JetField x = coordinate_field<Jet>(g.chart, 0);
  JetField y = coordinate_field<Jet>(g.chart, 1);
  JetField f(g.chart);
  for (std::size_t i = 0; i < f.v.size(); ++i)
    f.v[i] = ((x.v[i] + y.v[i]) * cplx(0, 1)).exp();
  JetField f1 = covariant_derivative(st, f, CovDir::d1);
  JetField zf = apply_vec(st.Z1, f);
  CHECK(max_abs(sub(f1, zf)) < 1e-12);
}

TEST_CASE("identity suite: flat Heisenberg") {
  auto st = solved_heis(16, 6);
  JetField x = coordinate_field<Jet>(st.chart, 0);
  JetField y = coordinate_field<Jet>(st.chart, 1);
  std::vector<JetField> tests;
  JetField f(st.chart);
  for (std::size_t i = 0; i < f.v.size(); ++i)
    f.v[i] = ((x.v[i] * 2.0 + y.v[i]) * cplx(0, 1)).exp();
  f.weight = 0;
  tests.push_back(f);
  JetField g = f;
  g.weight = 2;
  tests.push_back(g);
  auto rep = verify_identities(st, tests);
  CHECK(rep.comm_01 < 1e-10);
  CHECK(rep.comm_01b < 1e-10);
  CHECK(rep.comm_11b < 1e-10);
  CHECK(rep.bianchi < 1e-10);
  CHECK(rep.reeb_transport < 1e-10);
}

TEST_CASE("identity suite: rototranslation torus, random band-limited fields") {
  auto st = solved_roto(1, 32);
  std::vector<Field> tests;
  for (int k = -2; k <= 2; ++k) {
    Field C = random_band_limited(st.chart, 900 + k, 3, false, k);
    tests.push_back(C);
  }
  auto rep = verify_identities(st, tests);
  CHECK(rep.comm_01 < 1e-6);
  CHECK(rep.comm_01b < 1e-6);
  CHECK(rep.comm_11b < 1e-6);
  CHECK(rep.bianchi < 1e-8);
  CHECK(rep.reeb_transport < 1e-5);
}

TEST_CASE("nil-invariant: zero deformation is the flat model") {
  auto base = catalog_nil_base(16, 16);
  CHECK(max_abs(base.A11) < 1e-12);
  CHECK(max_abs(base.W) < 1e-12);

  Field beta = constant<cplx>(base.chart, 0.0);
  Field alpha = deformation_alpha(beta);
  Form t1 = deformed_coframe(base.theta1, alpha, beta);
  auto st = solve_structure(base.theta, t1);
  CHECK(max_abs(st.A11) < 1e-12);
  CHECK(max_abs(st.W) < 1e-12);
}

TEST_CASE("nil-invariant: Reeb-invariant deformation stays torsion-free") {
  auto base = catalog_nil_base(32, 32);
  Field beta = beta_mode(base.chart, 0.1, 1, 0);
  Field alpha = deformation_alpha(beta);
  Form t1 = deformed_coframe(base.theta1, alpha, beta);
  auto st = solve_structure(base.theta, t1);

  CHECK(max_abs(st.A11) < 1e-8);
  CHECK(st.res.normalization < 1e-10);
  // W picks up genuine spatial variation
  double wmax = max_abs(st.W);
  double wmin = 1e300;
  for (auto& z : st.W.v) wmin = std::min(wmin, std::abs(z));
  CHECK(wmax > 0.01);
  CHECK(wmax - wmin > 0.01);

  // cross-check W at two resolutions
  auto base2 = catalog_nil_base(64, 64);
  Field beta2 = beta_mode(base2.chart, 0.1, 1, 0);
  auto st2 = solve_structure(base2.theta,
                             deformed_coframe(base2.theta1, deformation_alpha(beta2), beta2));
  // compare on the coarse nodes (same coordinates at even indices)
  double dmax = 0.0;
  for (int ix = 0; ix < 32; ++ix)
    for (int iy = 0; iy < 32; ++iy) {
      cplx w1 = st.W.v[std::size_t(ix) * 32 + iy];
      cplx w2 = st2.W.v[std::size_t(2 * ix) * 64 + 2 * iy];
      dmax = std::max(dmax, std::abs(w1 - w2));
    }
  CHECK(dmax < 1e-8);
}

TEST_CASE("contact rescale: identity and constant factor") {
  auto st = solved_roto(1);
  Field zero = constant<cplx>(st.chart, 0.0);
  auto same = rescale_contact_form(st, zero);
  CHECK(max_abs_diff(same.A11, st.A11) < 1e-12);
  CHECK(max_abs_diff(same.W, st.W) < 1e-12);

  const double c = 0.3;
  Field cf = constant<cplx>(st.chart, c);
  auto sc = rescale_contact_form(st, cf);
  // W~ = e^{-2c} W and |A~| = e^{-2c} |A|
  CHECK(max_abs_diff(sc.W, scale(st.W, std::exp(-2 * c))) < 1e-10);
  Field absA(st.chart), absA0(st.chart);
  pointwise(absA, [&](cplx& o, long long i) { o = std::abs(sc.A11.v[i]); });
  pointwise(absA0, [&](cplx& o, long long i) { o = std::exp(-2 * c) * std::abs(st.A11.v[i]); });
  CHECK(max_abs_diff(absA, absA0) < 1e-10);
}

TEST_CASE("degenerate contact form is rejected") {
  auto ch = make_periodic3({8, 8, 8}, {kTwoPi, kTwoPi, kTwoPi});
  Form theta(ch, 1);
  theta.c[0] = constant<cplx>(ch, 1.0);  // theta = dx, d(theta) = 0
  Form raw(ch, 1);
  raw.c[1] = constant<cplx>(ch, 1.0);
  raw.c[2] = constant<cplx>(ch, cplx(0, 1));
  CHECK_THROWS_AS((void)admissible_coframe(theta, raw), Error);
}
