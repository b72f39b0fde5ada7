#pragma once

#include "crlab/geom/structure.hpp"

namespace crlab {

// Residuals of the three covariant-derivative commutation relations for a
// coefficient field of weight k, the curvature-torsion differential identity,
// and the Reeb transport consistency of the torsion.
struct IdentityReport {
  double comm_01 = 0.0;    // C,01 - C,10 = C,1b A11 - k C A11,1b
  double comm_01b = 0.0;   // C,01b - C,1b0 = C,1 A11b + k C A11b,1
  double comm_11b = 0.0;   // C,11b - C,1b1 = i C,0 + k C W
  double bianchi = 0.0;    // W,0 = A11,1b1b + A11b,11
  double reeb_transport = 0.0;  // L_T J vs 2 J o A, finite-difference transport
};

template <class S>
double commutation_residuals(const StructureT<S>& st, const FieldT<S>& C,
                             IdentityReport& rep) {
  const double k = C.weight;
  auto d1 = [&](const FieldT<S>& f) { return covariant_derivative(st, f, CovDir::d1); };
  auto d1b = [&](const FieldT<S>& f) { return covariant_derivative(st, f, CovDir::d1bar); };
  auto d0 = [&](const FieldT<S>& f) { return covariant_derivative(st, f, CovDir::d0); };

  FieldT<S> C1 = d1(C), C1b = d1b(C), C0 = d0(C);

  FieldT<S> r1 = sub(sub(d1(C0), d0(C1)), sub(mul(C1b, st.A11), scale(mul(C, covariant_derivative(st, st.A11, CovDir::d1bar)), k)));
  FieldT<S> r2 = sub(sub(d1b(C0), d0(C1b)), add(mul(C1, st.A11b), scale(mul(C, covariant_derivative(st, st.A11b, CovDir::d1)), k)));
  FieldT<S> r3 = sub(sub(d1b(C1), d1(C1b)), add(scale(C0, cplx(0, 1)), scale(mul(C, st.W), k)));

  rep.comm_01 = std::max(rep.comm_01, max_abs(r1));
  rep.comm_01b = std::max(rep.comm_01b, max_abs(r2));
  rep.comm_11b = std::max(rep.comm_11b, max_abs(r3));
  return std::max({max_abs(r1), max_abs(r2), max_abs(r3)});
}

template <class S>
double bianchi_residual(const StructureT<S>& st) {
  FieldT<S> w0d = covariant_derivative(st, st.W, CovDir::d0);
  FieldT<S> a = covd(st, st.A11, {CovDir::d1bar, CovDir::d1bar});
  FieldT<S> b = covd(st, st.A11b, {CovDir::d1, CovDir::d1});
  return max_abs(sub(w0d, add(a, b)));
}

// ---- endomorphism fields as frame matrices -----------------------------------

// coordinate-basis matrix of J = i theta1 (x) Z1 - i theta1bar (x) Z1bar
template <class S>
std::vector<FieldT<S>> J_matrix(const StructureT<S>& st) {
  const int n = st.chart->nforms;
  std::vector<FieldT<S>> m;
  VecT<S> Z1b = conjv(st.Z1);
  FormT<S> t1b = conjform(st.theta1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      FieldT<S> e = sub(mul_raw(st.theta1.c[b], st.Z1.c[a]),
                        mul_raw(t1b.c[b], Z1b.c[a]));
      m.push_back(scale(e, cplx(0, 1)));
    }
  return m;
}

// coordinate-basis matrix of 2 J o A
template <class S>
std::vector<FieldT<S>> JA2_matrix(const StructureT<S>& st) {
  const int n = st.chart->nforms;
  std::vector<FieldT<S>> m;
  VecT<S> Z1b = conjv(st.Z1);
  FormT<S> t1b = conjform(st.theta1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      FieldT<S> e = sub(mul_raw(mul_raw(st.A11, st.theta1.c[b]), Z1b.c[a]),
                        mul_raw(mul_raw(st.A11b, t1b.c[b]), st.Z1.c[a]));
      m.push_back(scale(e, cplx(0, -2)));
    }
  return m;
}

namespace transport_detail {

inline void invert3(const cplx m[3][3], cplx inv[3][3]) {
  cplx c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  cplx c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
  cplx c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  cplx det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
  cplx id = 1.0 / det;
  inv[0][0] = c00 * id;
  inv[1][0] = c01 * id;
  inv[2][0] = c02 * id;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * id;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * id;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * id;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * id;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * id;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * id;
}

// Residual of (pullback difference quotient) against the target, compared on
// the contact plane: the quotient is applied to Re Z1, Im Z1 and its value is
// projected along the Reeb direction (v -> v - theta(v) T) since a general
// contact flow does not preserve the Reeb splitting.
inline double pullback_residual(const cplx mplus[3][3], const cplx mminus[3][3],
                                const cplx jac[3][3], double eps,
                                const cplx target[3][3], const cplx theta_p[3],
                                const cplx reeb_p[3], const cplx z1_p[3]) {
  cplx dplus[3][3], dminus[3][3], inv[3][3];
  // D(phi_{+eps}) = I + eps Jac, D(phi_{-eps}) = I - eps Jac
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      dplus[r][c] = (r == c ? 1.0 : 0.0) + eps * jac[r][c];
      dminus[r][c] = (r == c ? 1.0 : 0.0) - eps * jac[r][c];
    }
  cplx pp[3][3] = {}, pm[3][3] = {};
  // (Dphi)^{-1} M(phi(p)) Dphi
  invert3(dplus, inv);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      cplx s = 0.0;
      for (int u = 0; u < 3; ++u)
        for (int v = 0; v < 3; ++v) s += inv[r][u] * mplus[u][v] * dplus[v][c];
      pp[r][c] = s;
    }
  invert3(dminus, inv);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      cplx s = 0.0;
      for (int u = 0; u < 3; ++u)
        for (int v = 0; v < 3; ++v) s += inv[r][u] * mminus[u][v] * dminus[v][c];
      pm[r][c] = s;
    }
  // contact-plane basis
  cplx basis[2][3];
  for (int a = 0; a < 3; ++a) {
    basis[0][a] = z1_p[a].real();
    basis[1][a] = z1_p[a].imag();
  }
  double res = 0.0;
  for (int e = 0; e < 2; ++e) {
    cplx q[3] = {}, t[3] = {};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        q[r] += (pp[r][c] - pm[r][c]) / (2 * eps) * basis[e][c];
        t[r] += target[r][c] * basis[e][c];
      }
    cplx th = 0.0;
    for (int r = 0; r < 3; ++r) th += theta_p[r] * q[r];
    for (int r = 0; r < 3; ++r) q[r] -= th * reeb_p[r];
    for (int r = 0; r < 3; ++r) res = std::max(res, std::abs(q[r] - t[r]));
  }
  return res;
}

} // namespace transport_detail

// || L_X J - target || by transporting J along the flow of X for +-eps and
// central-differencing the pullback. Grid version samples a node subset;
// `target` holds the 9 coordinate-matrix fields of the expected Lie derivative.
double lie_transport_residual(const Structure& st, const Vec& X,
                              const std::vector<Field>& target, double eps,
                              int max_samples = 64);

// || L_T J - 2 J o A ||, the torsion characterization of the Reeb flow
double reeb_transport_residual(const Structure& st, double eps = 1e-3,
                               int max_samples = 64);

// pointset version: evaluation off the samples uses the stored jets
double reeb_transport_residual(const JetStructure& st, double eps = 1e-3);

// convenience: full identity suite on one structure with supplied test fields
template <class S>
IdentityReport verify_identities(const StructureT<S>& st,
                                 const std::vector<FieldT<S>>& test_fields,
                                 double transport_eps = 1e-3) {
  IdentityReport rep;
  for (const auto& C : test_fields) commutation_residuals(st, C, rep);
  rep.bianchi = bianchi_residual(st);
  if constexpr (std::is_same_v<S, cplx>) {
    if (st.chart->kind == ChartKind::periodic3)
      rep.reeb_transport = reeb_transport_residual(st, transport_eps);
  } else {
    rep.reeb_transport = reeb_transport_residual(st, transport_eps);
  }
  return rep;
}

} // namespace crlab
