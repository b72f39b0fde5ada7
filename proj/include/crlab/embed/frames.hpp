#pragma once

#include "crlab/embed/hypersurface.hpp"

namespace crlab {

// ambient vector with holomorphic and antiholomorphic components
struct AVec {
  cplx h[2] = {0, 0};  // d/dz1, d/dz2
  cplx a[2] = {0, 0};  // d/dz1bar, d/dz2bar
};

inline AVec avec_conj(const AVec& v) {
  AVec out;
  for (int l = 0; l < 2; ++l) {
    out.h[l] = std::conj(v.a[l]);
    out.a[l] = std::conj(v.h[l]);
  }
  return out;
}

// complex 2-form on C^2 in the basis dz1^dz2, dz_l ^ dzbar_m, dzbar1^dzbar2
struct ATwoForm {
  cplx hh = 0;
  cplx ha[2][2] = {{0, 0}, {0, 0}};
  cplx aa = 0;

  cplx operator()(const AVec& v, const AVec& w) const {
    cplx s = hh * (v.h[0] * w.h[1] - v.h[1] * w.h[0]);
    s += aa * (v.a[0] * w.a[1] - v.a[1] * w.a[0]);
    for (int l = 0; l < 2; ++l)
      for (int m = 0; m < 2; ++m)
        s += ha[l][m] * (v.h[l] * w.a[m] - w.h[l] * v.a[m]);
    return s;
  }
};

// Adapted coframe data at an ambient point near M: theta = -i d'gamma, a
// type (1,0) coframe theta1 with d(theta) = i theta1 ^ theta1bar + rho theta
// ^ thetabar at M, and the dual (1,0) vectors V0 (= i zeta) and V1 (= Z1).
struct FrameAt {
  cplx z1, z2;
  cplx theta[2];
  cplx theta1[2];
  AVec V0, V1;
  double levi = 0;       // coefficient h after normalization
  cplx rho = 0;
  double resid_g1 = 0;   // |theta ^ theta1bar coefficient| after normalization
  double resid_h1 = 0;   // |theta1 ^ thetabar coefficient| at M (vanishes there)
};

namespace embed_detail {

// dual (1,0) vectors of a (1,0) coframe pair {theta, theta1}
inline void dual_pair(const cplx theta[2], const cplx theta1[2], AVec& V0, AVec& V1) {
  cplx det = theta[0] * theta1[1] - theta[1] * theta1[0];
  if (std::abs(det) < 1e-14) throw Error("degenerate coframe pair");
  // rows (theta; theta1) * (V) = e_i
  V0 = AVec{};
  V1 = AVec{};
  V0.h[0] = theta1[1] / det;
  V0.h[1] = -theta1[0] / det;
  V1.h[0] = -theta[1] / det;
  V1.h[1] = theta[0] / det;
}

// Levi pairing of (1,0) vectors: sum gamma_{l mbar} V^l conj(W^m)
inline cplx levi_pair(const Hypersurface& g, cplx z1, cplx z2, const AVec& V,
                      const AVec& W) {
  cplx s = 0;
  for (int l = 0; l < 2; ++l)
    for (int m = 0; m < 2; ++m) {
      int a1 = (l == 0), a2 = (l == 1);
      int b1 = (m == 0), b2 = (m == 1);
      s += g.dgamma(z1, z2, a1, b1, a2, b2) * V.h[l] * std::conj(W.h[m]);
    }
  return s;
}

} // namespace embed_detail

// The coordinate differential most independent of theta at a point; pinning
// this choice across a difference stencil keeps the coframe smooth.
inline int frame_pick(const Hypersurface& g, cplx z1, cplx z2) {
  cplx g1 = g.dgamma(z1, z2, 1, 0, 0, 0);
  cplx g2 = g.dgamma(z1, z2, 0, 0, 1, 0);
  return (std::abs(g2) >= std::abs(g1)) ? 0 : 1;
}

// The pointwise coframe construction: expand d(theta) in an initial coframe,
// read off (h, g1, h1, rho), and apply the (U, v) transformation that makes
// h = 1 with the mixed theta ^ theta1bar term removed at M.
inline FrameAt adapted_frame(const Hypersurface& g, cplx z1, cplx z2,
                             int init_choice = -1) {
  FrameAt f;
  f.z1 = z1;
  f.z2 = z2;
  const cplx i(0, 1);
  cplx g1 = g.dgamma(z1, z2, 1, 0, 0, 0);
  cplx g2 = g.dgamma(z1, z2, 0, 0, 1, 0);
  f.theta[0] = -i * g1;
  f.theta[1] = -i * g2;

  if (g.closed_frame) {
    const auto& cf = *g.closed_frame;
    f.theta1[0] = cf.theta1[0].eval(z1, z2);
    f.theta1[1] = cf.theta1[1].eval(z1, z2);
    embed_detail::dual_pair(f.theta, f.theta1, f.V0, f.V1);
    f.levi = embed_detail::levi_pair(g, z1, z2, f.V1, f.V1).real();
    f.rho = i * embed_detail::levi_pair(g, z1, z2, f.V0, f.V0);
    f.resid_g1 = std::abs(embed_detail::levi_pair(g, z1, z2, f.V0, f.V1));
    f.resid_h1 = std::abs(embed_detail::levi_pair(g, z1, z2, f.V1, f.V0));
    return f;
  }

  // initial coframe: the coordinate differential most independent of theta
  int pick = init_choice;
  if (pick < 0) pick = frame_pick(g, z1, z2);
  cplx init[2] = {pick == 0 ? cplx(1) : cplx(0), pick == 0 ? cplx(0) : cplx(1)};

  AVec V0, V1;
  embed_detail::dual_pair(f.theta, init, V0, V1);
  cplx h = embed_detail::levi_pair(g, z1, z2, V1, V1);
  if (h.real() <= 0) throw Error("Levi form not positive at the sample point");
  cplx gg1 = i * embed_detail::levi_pair(g, z1, z2, V0, V1);

  // theta1 = U init + v theta with |U|^2 = h and i v conj(U) = g1
  double U = std::sqrt(h.real());
  cplx v = -i * gg1 / U;
  f.theta1[0] = U * init[0] + v * f.theta[0];
  f.theta1[1] = U * init[1] + v * f.theta[1];

  embed_detail::dual_pair(f.theta, f.theta1, f.V0, f.V1);
  f.levi = embed_detail::levi_pair(g, z1, z2, f.V1, f.V1).real();
  f.rho = i * embed_detail::levi_pair(g, z1, z2, f.V0, f.V0);
  f.resid_g1 = std::abs(embed_detail::levi_pair(g, z1, z2, f.V0, f.V1));
  f.resid_h1 = std::abs(embed_detail::levi_pair(g, z1, z2, f.V1, f.V0));
  return f;
}

// d(theta) as an ambient 2-form at a point
inline ATwoForm dtheta_form(const Hypersurface& g, cplx z1, cplx z2) {
  ATwoForm w;
  const cplx i(0, 1);
  for (int l = 0; l < 2; ++l)
    for (int m = 0; m < 2; ++m) {
      int a1 = (l == 0), a2 = (l == 1);
      int b1 = (m == 0), b2 = (m == 1);
      w.ha[l][m] = i * g.dgamma(z1, z2, a1, b1, a2, b2);
    }
  return w;
}

// Connection and torsion of the adapted coframe at a point of M, from the
// frame-pair expansion of d(theta1). The theta1-coefficient of omega is fixed
// by the anti-hermitian normalization; the reality defect of the theta-leg is
// reported.
struct ConnAt {
  FrameAt frame;
  cplx A;           // A^1_{1bar}
  cplx wT, w1, w1b; // omega(T), omega(Z1), omega(Z1bar) on M
  cplx lambda;      // theta ^ thetabar coefficient of d(theta1)
  double reality;   // |Re(omega(T))| before projection
  double type02;    // |(0,2) component| of d(theta1)
};

// d(theta1) at p: exact for closed-form frames, otherwise central differences
// of the coframe pipeline (step `pipeline_h`).
inline ATwoForm dtheta1_form(const Hypersurface& g, cplx z1, cplx z2,
                             double pipeline_h = 1e-3) {
  ATwoForm w;
  if (g.closed_frame) {
    const auto& cf = *g.closed_frame;
    // d(P1 dz1 + P2 dz2)
    Poly P[2] = {cf.theta1[0], cf.theta1[1]};
    w.hh = (P[1].d(0) - P[0].d(2)).eval(z1, z2);
    for (int l = 0; l < 2; ++l)
      for (int m = 0; m < 2; ++m) {
        Poly q = P[l].d(m == 0 ? 1 : 3);  // dzbar_m of P_l
        w.ha[l][m] = (cplx(0.0) - q.eval(z1, z2));
      }
    w.aa = 0;
    return w;
  }
  const int pick = frame_pick(g, z1, z2);
  auto P = [&](int l, cplx w1_, cplx w2_) {
    return adapted_frame(g, w1_, w2_, pick).theta1[l];
  };
  const double h = pipeline_h;
  const cplx i(0, 1);
  // Wirtinger derivatives of the coefficient functions by central differences
  auto dP = [&](int l, int var, bool bar) {  // var 0: z1, 1: z2
    cplx fp, fm, gp, gm;
    if (var == 0) {
      fp = P(l, z1 + h, z2);
      fm = P(l, z1 - h, z2);
      gp = P(l, z1 + i * h, z2);
      gm = P(l, z1 - i * h, z2);
    } else {
      fp = P(l, z1, z2 + h);
      fm = P(l, z1, z2 - h);
      gp = P(l, z1, z2 + i * h);
      gm = P(l, z1, z2 - i * h);
    }
    cplx dx = (fp - fm) / (2 * h), dy = (gp - gm) / (2 * h);
    return bar ? (dx + i * dy) * 0.5 : (dx - i * dy) * 0.5;
  };
  w.hh = dP(1, 0, false) - dP(0, 1, false);
  for (int l = 0; l < 2; ++l)
    for (int m = 0; m < 2; ++m) w.ha[l][m] = -dP(l, m, true);
  w.aa = 0;  // theta1 is (1,0): no (0,2) part arises from d
  return w;
}

inline ConnAt connection_at(const Hypersurface& g, cplx z1, cplx z2,
                            double pipeline_h = 1e-3) {
  ConnAt c;
  c.frame = adapted_frame(g, z1, z2);
  ATwoForm dt1 = dtheta1_form(g, z1, z2, pipeline_h);

  const AVec& V0 = c.frame.V0;
  const AVec& V1 = c.frame.V1;
  AVec V0b = avec_conj(V0), V1b = avec_conj(V1);

  cplx c_t_t1 = dt1(V0, V1);     // theta ^ theta1
  cplx c_t_t1b = dt1(V0, V1b);   // theta ^ theta1bar -> torsion
  cplx c_t_tb = dt1(V0, V0b);    // theta ^ thetabar  -> lambda
  cplx c_t1_t1b = dt1(V1, V1b);  // theta1 ^ theta1bar
  cplx c_t1_tb = dt1(V1, V0b);   // theta1 ^ thetabar
  cplx c_t1b_tb = dt1(V1b, V0b); // (0,2) content, should vanish

  c.A = c_t_t1b;
  c.lambda = c_t_tb;
  c.type02 = std::abs(c_t1b_tb);

  cplx w0 = -c_t_t1;
  cplx w0b = c_t1_tb;
  cplx w1b = c_t1_t1b;
  // omega(T) with T = V0 + conj(V0); reality defect projected away
  cplx wT = w0 + w0b;
  c.reality = std::abs(wT.real());
  c.wT = cplx(0.0, wT.imag());
  c.w1b = w1b;
  c.w1 = -std::conj(w1b);
  return c;
}

} // namespace crlab
