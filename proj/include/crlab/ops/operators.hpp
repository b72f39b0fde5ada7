#pragma once

#include "crlab/geom/structure.hpp"

namespace crlab {

// Endomorphism of the contact bundle in unitary-frame components:
//   E = E11 theta1 (x) Z1bar + E11b theta1 (x) Z1
//     + conj mirrors (real endomorphisms store only the two fields).
// anti_commuting flags E o J + J o E = 0 (E11b = 0); cr_structure flags
// K^2 = -I, where K11b = i sqrt(1 + |K11|^2) on the branch fixed by K = J.
template <class S>
struct EndoT {
  FieldT<S> e11;   // weight +2
  FieldT<S> e11b;  // weight 0
  bool anti_commuting = false;
  bool cr_structure = false;
};

using Endo = EndoT<cplx>;
using JetEndo = EndoT<Jet>;

template <class S>
EndoT<S> endo_zero(ChartPtr ch) {
  EndoT<S> e{FieldT<S>(ch, 2), FieldT<S>(ch, 0), true, false};
  return e;
}

template <class S>
EndoT<S> endo_anti(FieldT<S> e11) {
  EndoT<S> e;
  e.e11 = std::move(e11);
  e.e11.weight = 2;
  e.e11b = FieldT<S>(e.e11.chart, 0);
  e.anti_commuting = true;
  return e;
}

// K with K^2 = -I from its (1,1) component; branch continuous with K = J
template <class S>
EndoT<S> endo_cr(FieldT<S> k11) {
  EndoT<S> e;
  e.e11 = std::move(k11);
  e.e11.weight = 2;
  FieldT<S> one = constant<S>(e.e11.chart, 1.0);
  e.e11b = scale(sqrtf_(realf(add(one, mul_raw(e.e11, conjf(e.e11))))), cplx(0, 1));
  e.cr_structure = true;
  return e;
}

template <class S>
EndoT<S> endo_add(const EndoT<S>& a, const EndoT<S>& b) {
  EndoT<S> e;
  e.e11 = add(a.e11, b.e11);
  e.e11b = add(a.e11b, b.e11b);
  e.anti_commuting = a.anti_commuting && b.anti_commuting;
  return e;
}

template <class S>
EndoT<S> endo_scale(const EndoT<S>& a, cplx s) {
  EndoT<S> e = a;
  e.e11 = scale(a.e11, s);
  e.e11b = scale(a.e11b, s);
  return e;
}

// J o E for anti-commuting E: components rotate by -i / +i
template <class S>
EndoT<S> endo_J_compose(const EndoT<S>& a) {
  EndoT<S> e = a;
  e.e11 = scale(a.e11, cplx(0, -1));
  return e;
}

template <class S>
double endo_max_diff(const EndoT<S>& a, const EndoT<S>& b) {
  return std::max(max_abs(sub(a.e11, b.e11)), max_abs(sub(a.e11b, b.e11b)));
}

// coordinate-basis matrix of a real endomorphism (conj mirrors included)
template <class S>
std::vector<FieldT<S>> endo_matrix(const StructureT<S>& st, const EndoT<S>& E) {
  const int n = st.chart->nforms;
  VecT<S> Z1b = conjv(st.Z1);
  FormT<S> t1b = conjform(st.theta1);
  std::vector<FieldT<S>> m;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      FieldT<S> s = mul_raw(mul_raw(E.e11, st.theta1.c[b]), Z1b.c[a]);
      pointwise(s, [&](S& o, long long i) {
        o += E.e11b.v[i] * st.theta1.c[b].v[i] * st.Z1.c[a].v[i];
      });
      // real endomorphism: add the conjugate mirror
      FieldT<S> sc = conjf(s);
      m.push_back(add(s, sc));
    }
  return m;
}

// ---- the differential operators of the theory ----------------------------------

// Q11 = (1/6) W,11 + (i/2) W A11 - A11,0 - (2i/3) A11,1b1
template <class S>
FieldT<S> cartan_tensor(const StructureT<S>& st) {
  FieldT<S> w11 = covd(st, st.W, {CovDir::d1, CovDir::d1});
  FieldT<S> wa = mul(st.W, st.A11);
  FieldT<S> a0 = covariant_derivative(st, st.A11, CovDir::d0);
  FieldT<S> a1b1 = covd(st, st.A11, {CovDir::d1bar, CovDir::d1});
  FieldT<S> q = scale(w11, 1.0 / 6.0);
  axpy(q, cplx(0, 0.5), wa);
  axpy(q, cplx(-1, 0), a0);
  axpy(q, cplx(0, -2.0 / 3.0), a1b1);
  q.weight = 2;
  return q;
}

// D_J f = (f,11 + i A11 f) theta1 (x) Z1bar + conj mirror
template <class S>
EndoT<S> op_DJ(const StructureT<S>& st, const FieldT<S>& f) {
  FieldT<S> f11 = covd(st, f, {CovDir::d1, CovDir::d1});
  FieldT<S> e = add(f11, scale(mul(st.A11, f), cplx(0, 1)));
  return endo_anti(std::move(e));
}

// D_J^* E = E11,1b1b + E11bb,11 - i A11bb E11 + i A11 E11bb (real for real E)
template <class S>
FieldT<S> op_DJ_star(const StructureT<S>& st, const EndoT<S>& E) {
  FieldT<S> d = covd(st, E.e11, {CovDir::d1bar, CovDir::d1bar});
  FieldT<S> ebb = conjf(E.e11);
  FieldT<S> out = add(d, conjf(d));
  axpy(out, cplx(0, -1), mul(st.A11b, E.e11));
  axpy(out, cplx(0, 1), mul(st.A11, ebb));
  out.weight = 0;
  return out;
}

// F_J K = (i K11b K11,1b1b + i K1b1b K11,1b1) + conjugate
template <class S>
FieldT<S> op_FJ(const StructureT<S>& st, const EndoT<S>& K) {
  FieldT<S> k_bb = covd(st, K.e11, {CovDir::d1bar, CovDir::d1bar});
  FieldT<S> k_b1 = covd(st, K.e11, {CovDir::d1bar, CovDir::d1});
  FieldT<S> expr = add(mul(K.e11b, k_bb), mul(conjf(K.e11), k_b1));
  expr = scale(expr, cplx(0, 1));
  FieldT<S> out = add(expr, conjf(expr));
  out.weight = 0;
  return out;
}

// (frakD_J h) component of theta1bar (x) Z1: h,1b1b - i A1b1b h  (weight -2)
template <class S>
FieldT<S> op_frakD(const StructureT<S>& st, const FieldT<S>& h) {
  FieldT<S> d = covd(st, h, {CovDir::d1bar, CovDir::d1bar});
  FieldT<S> out = sub(d, scale(mul(st.A11b, h), cplx(0, 1)));
  out.weight = -2;
  return out;
}

// L_alpha C = -C,11b - C,1b1 + i alpha C,0
template <class S>
FieldT<S> op_Lalpha(const StructureT<S>& st, const FieldT<S>& C, cplx alpha) {
  FieldT<S> a = covd(st, C, {CovDir::d1, CovDir::d1bar});
  FieldT<S> b = covd(st, C, {CovDir::d1bar, CovDir::d1});
  FieldT<S> c = covariant_derivative(st, C, CovDir::d0);
  FieldT<S> out = scale(add(a, b), -1.0);
  axpy(out, cplx(0, 1) * alpha, c);
  out.weight = C.weight;
  return out;
}

// contact Hamiltonian field X_f = -f T + i (Z1 f) Z1bar - i (Z1bar f) Z1
template <class S>
VecT<S> contact_field(const StructureT<S>& st, const FieldT<S>& f) {
  FieldT<S> zf = apply_vec(st.Z1, f);
  FieldT<S> zbf = apply_vec(conjv(st.Z1), f);
  VecT<S> X(st.chart);
  VecT<S> Z1b = conjv(st.Z1);
  for (int a = 0; a < st.chart->nforms; ++a) {
    X.c[a] = scale(mul(f, st.T.c[a]), -1.0);
    axpy(X.c[a], cplx(0, 1), mul(zf, Z1b.c[a]));
    axpy(X.c[a], cplx(0, -1), mul(zbf, st.Z1.c[a]));
  }
  return X;
}

// pseudohermitian Einstein-Hilbert action -int W theta ^ dtheta (positive
// contact-volume orientation)
inline double action_energy(const Structure& st) {
  return -structure_integral(st, st.W);
}

// inner product on endomorphism fields: 2 Re int E11 conj(F11) dvol
inline double endo_pairing(const Structure& st, const Endo& a, const Endo& b) {
  return 2.0 * structure_pairing(st, a.e11, b.e11).real();
}

// ---- flow-velocity conversions --------------------------------------------------
// d(theta1)/dt = -i E1b1b theta1bar; for the Cartan tensor as a velocity,
// E11 = i Q11. The (alpha, beta) deformation pair against a frozen base frame
// then evolves by alpha' = -i E1b1b conj(beta), beta' = -i E1b1b conj(alpha).

template <class S>
FieldT<S> coframe_velocity(const EndoT<S>& E) {
  // -i E1b1b = -i conj(E11)
  return scale(conjf(E.e11), cplx(0, -1));
}

template <class S>
EndoT<S> cartan_velocity(const StructureT<S>& st) {
  return endo_anti(scale(cartan_tensor(st), cplx(0, 1)));
}

template <class S>
EndoT<S> torsion_velocity(const StructureT<S>& st) {
  return endo_anti(scale(st.A11, -1.0));
}

// K components in the current frame from its coordinate-basis matrix
template <class S>
EndoT<S> endo_from_matrix(const StructureT<S>& st, const std::vector<FieldT<S>>& m) {
  const int n = st.chart->nforms;
  VecT<S> KZ1(st.chart);
  for (int a = 0; a < n; ++a) {
    FieldT<S> acc(st.chart, 0);
    for (int b = 0; b < n; ++b) {
      FieldT<S> t = mul_raw(m[a * n + b], st.Z1.c[b]);
      pointwise(acc, [&](S& o, long long i) { o += t.v[i]; });
    }
    dealias_inplace(acc);
    KZ1.c[a] = acc;
  }
  EndoT<S> e;
  e.e11 = eval1(conjform(st.theta1), KZ1);
  e.e11.weight = 2;
  e.e11b = eval1(st.theta1, KZ1);
  e.e11b.weight = 0;
  return e;
}

} // namespace crlab
