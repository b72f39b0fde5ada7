#pragma once

#include "crlab/embed/frames.hpp"

namespace crlab {

// Real tangent/ambient vectors are carried as complex pairs (rate of change of
// (z1, z2)); multiplication by i is the ambient complex structure.
using CPair = std::array<cplx, 2>;

inline CPair pair_scale(const CPair& v, cplx s) { return {v[0] * s, v[1] * s}; }
inline CPair pair_add(const CPair& a, const CPair& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline CPair pair_sub(const CPair& a, const CPair& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline double pair_norm(const CPair& v) {
  return std::sqrt(std::norm(v[0]) + std::norm(v[1]));
}
inline double pair_re_inner(const CPair& a, const CPair& b) {
  return (a[0] * std::conj(b[0]) + a[1] * std::conj(b[1])).real();
}

// Y_f = i (f zeta + f^{,1} Z1) in ambient (1,0) components, zeta = -i V0.
struct SectionValue {
  CPair Y;
  cplx theta_of_Y;       // should reproduce f
  double contraction_residual;  // | d(theta)(Y, Z1bar) + Z1bar f | and the Z1 leg
  double tangency_defect;       // | d(gamma)(2 Re Y) |
};

inline CPair Yf_value(const Hypersurface& g, const Poly& f, cplx z1, cplx z2,
                      int pick = -1) {
  FrameAt fr = adapted_frame(g, z1, z2, pick);
  cplx fv = f.eval(z1, z2);
  cplx zbf = std::conj(fr.V1.h[0]) * f.d(1).eval(z1, z2) +
             std::conj(fr.V1.h[1]) * f.d(3).eval(z1, z2);
  const cplx i(0, 1);
  CPair out;
  for (int l = 0; l < 2; ++l)
    out[l] = i * (fv * (-i) * fr.V0.h[l] + zbf * fr.V1.h[l]);
  return out;
}

inline SectionValue vector_Yf(const Hypersurface& g, const Poly& f, cplx z1, cplx z2) {
  FrameAt fr = adapted_frame(g, z1, z2);
  SectionValue s;
  s.Y = Yf_value(g, f, z1, z2);
  s.theta_of_Y = fr.theta[0] * s.Y[0] + fr.theta[1] * s.Y[1];

  // d(theta)(Y_f, .) = -dbar_b f mod thetabar: check both (0,1) frame legs
  ATwoForm dt = dtheta_form(g, z1, z2);
  AVec Yv;
  Yv.h[0] = s.Y[0];
  Yv.h[1] = s.Y[1];
  AVec V1b = avec_conj(fr.V1);
  cplx zbf = std::conj(fr.V1.h[0]) * f.d(1).eval(z1, z2) +
             std::conj(fr.V1.h[1]) * f.d(3).eval(z1, z2);
  cplx r1 = dt(Yv, V1b) + zbf;       // = -(dbar_b f)(Z1bar) + ...
  cplx r2 = dt(Yv, fr.V1);           // (1,0) leg must vanish
  s.contraction_residual = std::max(std::abs(r1), std::abs(r2));

  cplx g1 = g.dgamma(z1, z2, 1, 0, 0, 0);
  cplx g2 = g.dgamma(z1, z2, 0, 0, 1, 0);
  s.tangency_defect = std::abs(2.0 * (g1 * s.Y[0] + g2 * s.Y[1]).real());
  return s;
}

// ---- the tangential Cauchy-Riemann identity and the route comparison ----------

// Z1bar applied to an ambient scalar function: Wirtinger central differences
// of the dzbar_m partials contracted with the conjugate frame coefficients.
template <class F>
cplx apply_Z1bar(F fn, const AVec& V1, cplx z1, cplx z2, double h) {
  const cplx i(0, 1);
  auto dbar = [&](int m) {
    if (m == 0)
      return ((fn(z1 + h, z2) - fn(z1 - h, z2)) +
              i * (fn(z1 + i * h, z2) - fn(z1 - i * h, z2))) /
             (4.0 * h);
    return ((fn(z1, z2 + h) - fn(z1, z2 - h)) +
            i * (fn(z1, z2 + i * h) - fn(z1, z2 - i * h))) /
           (4.0 * h);
  };
  return std::conj(V1.h[0]) * dbar(0) + std::conj(V1.h[1]) * dbar(1);
}

// (frakD_J f) component f,1b1b - i A1b1b f through the adapted connection
inline cplx frakD_component(const Hypersurface& g, const Poly& f, cplx z1,
                            cplx z2, const ConnAt& conn) {
  const double h = g.exact() ? 1e-4 : 1e-3;
  const int pick = frame_pick(g, z1, z2);
  auto s_at = [&](cplx w1, cplx w2) {
    FrameAt fq = adapted_frame(g, w1, w2, pick);
    return std::conj(fq.V1.h[0]) * f.d(1).eval(w1, w2) +
           std::conj(fq.V1.h[1]) * f.d(3).eval(w1, w2);
  };
  cplx zb_s = apply_Z1bar(s_at, conn.frame.V1, z1, z2, h);
  cplx f1b1b = zb_s + conn.w1b * s_at(z1, z2);
  return f1b1b - cplx(0, 1) * conn.A * f.eval(z1, z2);
}

struct DbarReport {
  cplx bracket_coeff;    // theta1 component of (dbar_b Y_f)(Z1bar)
  cplx frakD_coeff;      // (frakD_J f) component: f,1b1b - i A1b1b f
  double lemma62;        // componentwise | (dbar_b Y_f)(Z1bar) - i frakD f (Z1bar) |
  double route;          // | 4 Im dbar_b Y_f - 4 Re frakD f | componentwise
  double theta_leg;      // | theta((dbar_b Y)(Z1bar)) |, vanishes for contact sections
};

inline DbarReport dbar_b_check(const Hypersurface& g, const Poly& f, cplx z1,
                               cplx z2) {
  DbarReport rep;
  ConnAt conn = connection_at(g, z1, z2);
  const FrameAt& fr = conn.frame;
  const double h = g.exact() ? 1e-4 : 1e-3;

  // bracket route: H^l = Z1bar(Y^l), the type-(1,0) projection of the bracket
  // of extensions
  const int pick = frame_pick(g, z1, z2);
  CPair H;
  for (int l = 0; l < 2; ++l) {
    auto comp = [&](cplx w1, cplx w2) { return Yf_value(g, f, w1, w2, pick)[l]; };
    H[l] = apply_Z1bar(comp, fr.V1, z1, z2, h);
  }

  rep.frakD_coeff = frakD_component(g, f, z1, z2, conn);

  // compare as vectors: H vs i frakD * Z1
  double worst = 0.0;
  const cplx i(0, 1);
  for (int l = 0; l < 2; ++l)
    worst = std::max(worst, std::abs(H[l] - i * rep.frakD_coeff * fr.V1.h[l]));
  rep.lemma62 = worst;

  rep.bracket_coeff = fr.theta1[0] * H[0] + fr.theta1[1] * H[1];
  rep.theta_leg = std::abs(fr.theta[0] * H[0] + fr.theta[1] * H[1]);
  // 4 Im(dbar_b Y) component = -2i H_coeff; 4 Re(frakD) component = 2 G
  rep.route = std::abs(-2.0 * i * rep.bracket_coeff - 2.0 * rep.frakD_coeff);
  return rep;
}

// ---- the section embedding chi_f and its CR defect ----------------------------

struct ChiReport {
  CPair image;
  double cr_defect;
};

inline ChiReport chi_embedding(const Hypersurface& g, const Poly& f, cplx z1,
                               cplx z2) {
  ChiReport rep;
  CPair Y = Yf_value(g, f, z1, z2);
  if (pair_norm(Y) > 0.5)
    throw Error("chi_f leaves the tubular neighbourhood of the surface");
  rep.image = {z1 + Y[0], z2 + Y[1]};

  FrameAt fr = adapted_frame(g, z1, z2);
  // real contact-plane basis
  CPair v1{fr.V1.h[0], fr.V1.h[1]};
  CPair v2{cplx(0, 1) * fr.V1.h[0], cplx(0, 1) * fr.V1.h[1]};
  const double h = g.exact() ? 1e-5 : 1e-3;
  const int pick = frame_pick(g, z1, z2);
  auto chi = [&](cplx w1, cplx w2) {
    CPair Yq = Yf_value(g, f, w1, w2, pick);
    return CPair{w1 + Yq[0], w2 + Yq[1]};
  };
  auto push = [&](const CPair& v) {
    CPair p = chi(z1 + h * v[0], z2 + h * v[1]);
    CPair m = chi(z1 - h * v[0], z2 - h * v[1]);
    return pair_scale(pair_sub(p, m), 1.0 / (2 * h));
  };
  CPair w1 = push(v1), w2 = push(v2);

  // orthonormalize the pushed plane, then measure how far J w_i leaves it
  CPair e1 = pair_scale(w1, 1.0 / pair_norm(w1));
  CPair e2 = pair_sub(w2, pair_scale(e1, pair_re_inner(w2, e1)));
  e2 = pair_scale(e2, 1.0 / pair_norm(e2));
  double defect = 0.0;
  for (const CPair& w : {w1, w2}) {
    CPair jw = pair_scale(w, cplx(0, 1));
    CPair rem = pair_sub(jw, pair_add(pair_scale(e1, pair_re_inner(jw, e1)),
                                      pair_scale(e2, pair_re_inner(jw, e2))));
    defect = std::max(defect, pair_norm(rem) / pair_norm(w));
  }
  rep.cr_defect = defect;
  return rep;
}

// ---- the tangency identity: L_{2 Re Y_f} J = 4 Re(frakD_J f) ------------------

inline double tangency_residual(const Hypersurface& g, const Poly& f, cplx z1,
                                cplx z2, double eps) {
  ConnAt conn = connection_at(g, z1, z2);
  const FrameAt& fr = conn.frame;
  const int pick = frame_pick(g, z1, z2);

  auto flow_field = [&](cplx w1, cplx w2) {
    CPair Y = Yf_value(g, f, w1, w2, pick);
    return Y;  // 2 Re Y moves (z1, z2) at rate (Y^1, Y^2)
  };

  // phi_{+-eps}(q) = q +- eps 2ReY(q); Jacobian action by directional
  // differencing of the displacement
  auto dphi = [&](const CPair& base, const CPair& v, double sign) {
    const double h = g.exact() ? 1e-5 : 1e-3;
    CPair fp = flow_field(base[0] + h * v[0], base[1] + h * v[1]);
    CPair fm = flow_field(base[0] - h * v[0], base[1] - h * v[1]);
    CPair dY = pair_scale(pair_sub(fp, fm), 1.0 / (2 * h));
    return pair_add(v, pair_scale(dY, sign * eps));
  };
  // inverse of d(phi) to second order: (I +- eps D)^{-1} u = u -+ eps D u + eps^2 D^2 u
  auto dphi_inv = [&](const CPair& base, const CPair& u, double sign) {
    const double h = g.exact() ? 1e-5 : 1e-3;
    auto D = [&](const CPair& v) {
      CPair fp = flow_field(base[0] + h * v[0], base[1] + h * v[1]);
      CPair fm = flow_field(base[0] - h * v[0], base[1] - h * v[1]);
      return pair_scale(pair_sub(fp, fm), 1.0 / (2 * h));
    };
    CPair du = D(u);
    CPair ddu = D(du);
    return pair_add(pair_sub(u, pair_scale(du, sign * eps)),
                    pair_scale(ddu, eps * eps));
  };

  CPair p{z1, z2};
  CPair v1{fr.V1.h[0], fr.V1.h[1]};
  CPair v2{cplx(0, 1) * fr.V1.h[0], cplx(0, 1) * fr.V1.h[1]};
  CPair Treal{fr.V0.h[0], fr.V0.h[1]};

  const cplx i(0, 1);
  double worst = 0.0;
  for (const CPair& v : {v1, v2}) {
    auto transported = [&](double sign) {
      CPair w = dphi(p, v, sign);
      CPair jw = pair_scale(w, i);
      return dphi_inv(p, jw, sign);
    };
    CPair qp = transported(+1.0), qm = transported(-1.0);
    CPair fd = pair_scale(pair_sub(qp, qm), 1.0 / (2 * eps));

    // project to the contact plane: remove the surface-normal part (2ReY_f is
    // not tangent for complex f, so the full quotient leaks off TM), then the
    // Reeb part
    cplx g1 = g.dgamma(z1, z2, 1, 0, 0, 0);
    cplx g2 = g.dgamma(z1, z2, 0, 0, 1, 0);
    {
      CPair nu{std::conj(g1), std::conj(g2)};  // ambient gradient direction
      double dg_fd = 2.0 * (g1 * fd[0] + g2 * fd[1]).real();
      double dg_nu = 2.0 * (g1 * nu[0] + g2 * nu[1]).real();
      fd = pair_sub(fd, pair_scale(nu, dg_fd / dg_nu));
    }
    cplx th = -i * (g1 * fd[0] + g2 * fd[1]);
    fd = pair_sub(fd, pair_scale(Treal, th));

    // Target: the real endomorphism 4 Re(frakD f) applied to v, up to the
    // overall sign fixed by the flow orientation here. With X = 2 Re Y_f and
    // the pullback convention L_X J = d/de phi_e^* J, the direct bracket
    // computation gives L_X J (v) = -2 G conj(theta1(v)) Z1 + conj-mirror:
    // for real f the generators satisfy 2 Re Y_f = -X_f on M, matching
    // D_J f = (1/2) L_{X_f} J from the intrinsic suite.
    cplx G = frakD_component(g, f, z1, z2, conn);
    cplx t1v = fr.theta1[0] * v[0] + fr.theta1[1] * v[1];
    CPair z1pair{fr.V1.h[0], fr.V1.h[1]};
    CPair target = pair_scale(z1pair, -2.0 * G * std::conj(t1v));
    worst = std::max(worst, pair_norm(pair_sub(fd, target)));
  }
  return worst;
}

} // namespace crlab
