#pragma once

#include "crlab/embed/hypersurface.hpp"
#include "crlab/geom/structure.hpp"

namespace crlab {

// The round sphere as an intrinsic pseudohermitian structure on an ambient
// pointset chart: jets in (x1, y1, x2, y2) at surface samples, closed-form
// frame Z1 = z2bar d1 - z1bar d2, T = i zeta - i zetabar with zeta the radial
// field. The generic contraction solver then produces A, W, Q exactly.
inline JetStructure sphere_structure(int npts = 64, int jet_order = 6,
                                     std::uint64_t seed = 3) {
  auto g = make_sphere();
  auto samples = sample_surface(g, npts, seed);
  std::vector<std::array<double, 4>> pts;
  for (auto& s : samples)
    pts.push_back({s[0].real(), s[0].imag(), s[1].real(), s[1].imag()});
  ChartPtr ch = make_pointset(std::move(pts), 4, jet_order);

  const cplx i(0, 1);
  auto jets_of = [&](const Poly& p) {
    JetField out(ch, 0);
    for (std::size_t k = 0; k < ch->nodes(); ++k) {
      cplx z1(ch->points[k][0], ch->points[k][1]);
      cplx z2(ch->points[k][2], ch->points[k][3]);
      out.v[k] = p.to_jet(jet_order, z1, z2);
    }
    return out;
  };

  // complex (1,0)-form P1 dz1 + P2 dz2 -> components over (dx1, dy1, dx2, dy2)
  auto holo_form = [&](const Poly& P1, const Poly& P2) {
    JetForm w(ch, 1);
    JetField p1 = jets_of(P1), p2 = jets_of(P2);
    w.c[0] = p1;
    w.c[1] = scale(p1, i);
    w.c[2] = p2;
    w.c[3] = scale(p2, i);
    return w;
  };
  // complex (1,0)-vector v1 d1 + v2 d2 -> real-leg components (d_l = (dx - i dy)/2)
  auto holo_vec = [&](const Poly& v1, const Poly& v2) {
    JetVec v(ch);
    JetField a = jets_of(v1), b = jets_of(v2);
    v.c[0] = scale(a, 0.5);
    v.c[1] = scale(a, -0.5 * i);
    v.c[2] = scale(b, 0.5);
    v.c[3] = scale(b, -0.5 * i);
    return v;
  };

  // theta = -i d'gamma = -i (z1bar dz1 + z2bar dz2)
  JetForm theta = holo_form(cplx(0, -1) * poly_z1b(), cplx(0, -1) * poly_z2b());
  // closed-form coframe and frames
  JetForm theta1 = holo_form(poly_z2(), cplx(-1.0) * poly_z1());
  JetVec Z1 = holo_vec(poly_z2b(), cplx(-1.0) * poly_z1b());
  // T = i zeta + conj: real vector
  JetVec T = holo_vec(cplx(0, 1) * poly_z1(), cplx(0, 1) * poly_z2());
  for (int a = 0; a < 4; ++a) T.c[a] = add(T.c[a], conjf(T.c[a]));

  return solve_structure(theta, theta1, &T, &Z1);
}

} // namespace crlab
