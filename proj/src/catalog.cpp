#include "crlab/geom/catalog.hpp"

#include <cmath>

namespace crlab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double halton1(std::uint64_t i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * double(i % base);
    i /= base;
  }
  return r;
}
} // namespace

std::vector<std::array<double, 4>> halton_points(int npts, int dim,
                                                 std::array<double, 4> lo,
                                                 std::array<double, 4> hi,
                                                 std::uint64_t skip) {
  static const int bases[4] = {2, 3, 5, 7};
  std::vector<std::array<double, 4>> pts(npts, {0, 0, 0, 0});
  for (int p = 0; p < npts; ++p)
    for (int d = 0; d < dim; ++d)
      pts[p][d] = lo[d] + (hi[d] - lo[d]) * halton1(skip + 1 + p, bases[d]);
  return pts;
}

GridGeometry catalog_t3_roto(int n, std::array<int, 3> res) {
  if (n <= 0) throw Error("t3-roto needs n >= 1");
  GridGeometry g;
  g.chart = make_periodic3(res, {kTwoPi, kTwoPi, kTwoPi});
  g.theta = Form(g.chart, 1);
  g.theta1_raw = Form(g.chart, 1);

  Field cosnz(g.chart), sinnz(g.chart);
  pointwise(cosnz, [&](cplx& o, long long i) {
    o = std::cos(double(n) * g.chart->coord(std::size_t(i), 2));
  });
  pointwise(sinnz, [&](cplx& o, long long i) {
    o = std::sin(double(n) * g.chart->coord(std::size_t(i), 2));
  });

  g.theta.c[0] = cosnz;
  g.theta.c[1] = sinnz;
  // raw coframe dz + i(-sin(nz) dx + cos(nz) dy)
  g.theta1_raw.c[0] = scale(sinnz, cplx(0, -1));
  g.theta1_raw.c[1] = scale(cosnz, cplx(0, 1));
  g.theta1_raw.c[2] = constant<cplx>(g.chart, 1.0);
  return g;
}

static Structure nil_base_on(ChartPtr ch) {
  Form theta(ch, 1), theta1(ch, 1);
  theta.c[0] = constant<cplx>(ch, 1.0);
  const double s = 1.0 / std::sqrt(2.0);
  theta1.c[1] = constant<cplx>(ch, s);
  theta1.c[2] = constant<cplx>(ch, cplx(0, s));
  return solve_structure(theta, theta1);
}

Structure catalog_nil_base(int nx, int ny) {
  return nil_base_on(make_invariant2(nx, ny, {kTwoPi, kTwoPi}, kTwoPi));
}

Structure catalog_nil3_base(std::array<int, 3> res) {
  return nil_base_on(make_nil3(res, {kTwoPi, kTwoPi, kTwoPi}));
}

Field beta_mode(ChartPtr chart, cplx amp, int mx, int my) {
  Field b(chart, 0);
  int xaxis = -1, yaxis = -1;
  for (int a = 0; a < chart->naxes(); ++a) {
    if (chart->axes[a].name == "x") xaxis = a;
    if (chart->axes[a].name == "y") yaxis = a;
  }
  if (xaxis < 0 || yaxis < 0) throw Error("beta_mode needs x and y axes");
  pointwise(b, [&](cplx& o, long long i) {
    double ph = 0.0;
    ph += double(mx) * kTwoPi / chart->axes[xaxis].length * chart->coord(std::size_t(i), xaxis);
    ph += double(my) * kTwoPi / chart->axes[yaxis].length * chart->coord(std::size_t(i), yaxis);
    o = amp * std::polar(1.0, ph);
  });
  return b;
}

PointGeometry catalog_heis_flat(int npts, int jet_order, std::uint64_t seed) {
  PointGeometry g;
  auto pts = halton_points(npts, 3, {0, 0, 0, 0}, {kTwoPi, kTwoPi, kTwoPi, 0}, seed);
  g.chart = make_pointset(std::move(pts), 3, jet_order);
  g.theta = JetForm(g.chart, 1);
  g.theta1_raw = JetForm(g.chart, 1);
  // coordinates (x, y, t); theta = dt + x dy
  JetField x = coordinate_field<Jet>(g.chart, 0);
  g.theta.c[1] = x;
  g.theta.c[2] = constant<Jet>(g.chart, 1.0);
  g.theta1_raw.c[0] = constant<Jet>(g.chart, 1.0);
  g.theta1_raw.c[1] = constant<Jet>(g.chart, cplx(0, 1));
  return g;
}

} // namespace crlab
