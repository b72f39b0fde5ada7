#pragma once

#include "crlab/geom/structure.hpp"

namespace crlab {

// The certificate equation  u,11 + i u A11 = i E11  is linear in u; it is
// solved in least squares by conjugate gradients on the normal equations,
// with the operator and its adjoint applied spectrally.
class CertificateOp {
public:
  explicit CertificateOp(const Structure& st) : st_(&st) {}

  Field apply(const Field& u) const {
    Field w = u;
    w.weight = 0;
    Field u11 = covd(*st_, w, {CovDir::d1, CovDir::d1});
    Field out = add(u11, scale(mul(st_->A11, w), cplx(0, 1)));
    out.weight = 2;
    return out;
  }

  // exact adjoint of the discrete operator in the plain l2 pairing
  // (the supported charts have uniform quadrature weights)
  Field applyH(const Field& v) const {
    Field out = cd1H(cd1H(v, 1), 0);
    Field pv = v;
    dealias_inplace(pv);
    axpy(out, cplx(0, -1), mul_raw(conjf(st_->A11), pv));
    out.weight = 0;
    return out;
  }

private:
  // adjoint of one covariant derivative stage acting on weight-k input:
  // (P(sum_a Z1^a D_a) - k P M_w1)^H = -sum_a D_a M_conj(Z1^a) P - k M_conj(w1) P
  Field cd1H(const Field& v, int k) const {
    Field pv = v;
    dealias_inplace(pv);
    Field out(v.chart, 0);
    VecT<cplx> z1c = conjv(st_->Z1);
    for (int a = 0; a < v.chart->nforms; ++a) {
      Field t = dirderiv(mul_raw(z1c.c[a], pv), a);
      axpy(out, cplx(-1, 0), t);
    }
    if (k != 0) axpy(out, cplx(-double(k), 0), mul_raw(conjf(st_->w1), pv));
    return out;
  }

  const Structure* st_;
};

struct Certificate {
  Field u;
  double residual_l2 = 0;
  double residual_max = 0;
  double margin = 0;        // min |Re u|
  int iterations = 0;
  bool converged = false;   // least-squares stationarity reached
};

struct CertificateOptions {
  int max_iterations = 2000;
  double tol_normal = 1e-12;   // on ||L^H r|| / ||L^H b||
};

// residual of the certificate equation, recomputed through the covariant
// calculus rather than the solver's recursion
inline std::pair<double, double> certificate_residual(const Structure& st,
                                                      const Field& u,
                                                      const Field& E11) {
  Field w = u;
  w.weight = 0;
  Field lhs = add(covd(st, w, {CovDir::d1, CovDir::d1}),
                  scale(mul(st.A11, w), cplx(0, 1)));
  Field r = sub(lhs, scale(E11, cplx(0, 1)));
  Field r2 = realf(mul_raw(r, conjf(r)));
  double l2 = std::sqrt(std::abs(structure_integral(st, r2)));
  return {l2, max_abs(r)};
}

inline double certificate_margin(const Field& u) {
  double m = 1e300;
  for (auto& z : u.v) m = std::min(m, std::abs(z.real()));
  return m;
}

// Least-squares solve of u,11 + i u A11 = i E11. An unsolvable equation is an
// expected outcome: the best residual is reported, nothing throws.
inline Certificate solve_certificate(const Structure& st, const Field& E11,
                                     CertificateOptions opt = {}) {
  CertificateOp L(st);
  Field b = scale(E11, cplx(0, 1));

  Certificate out;
  out.u = Field(st.chart, 0);

  Field r = b;                 // r = b - L u, u = 0
  Field s = L.applyH(r);
  Field p = s;
  double gamma = dot(s, s).real();
  const double gamma0 = std::sqrt(std::max(gamma, 1e-300));

  for (int it = 0; it < opt.max_iterations; ++it) {
    if (std::sqrt(gamma) <= opt.tol_normal * gamma0) {
      out.converged = true;
      break;
    }
    Field q = L.apply(p);
    double qq = dot(q, q).real();
    if (qq <= 0) break;
    double ak = gamma / qq;
    axpy(out.u, ak, p);
    axpy(r, -ak, q);
    s = L.applyH(r);
    double gnew = dot(s, s).real();
    p = add(s, scale(p, gnew / gamma));
    gamma = gnew;
    out.iterations = it + 1;
  }
  if (std::sqrt(gamma) <= opt.tol_normal * gamma0) out.converged = true;

  auto [l2, mx] = certificate_residual(st, out.u, E11);
  out.residual_l2 = l2;
  out.residual_max = mx;
  out.margin = certificate_margin(out.u);
  return out;
}

} // namespace crlab
