#pragma once

#include "crlab/fields/forms.hpp"

namespace crlab {

// ---- pointwise 3x3 solves ----------------------------------------------------

template <class S>
S inv_scalar(const S& s) {
  if constexpr (std::is_same_v<S, cplx>) return 1.0 / s;
  else return s.recip();
}

// x solving M x = b with rows M[0..2], all per-node scalars
template <class S>
void cramer3_point(const S m[3][3], const S b[3], S x[3]) {
  S c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  S c01 = m[1][0] * m[2][2] - m[1][2] * m[2][0];
  S c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  S det = m[0][0] * c00 - m[0][1] * c01 + m[0][2] * c02;
  S idet = inv_scalar(det);
  S d0 = b[0] * c00 - m[0][1] * (b[1] * m[2][2] - m[1][2] * b[2]) +
         m[0][2] * (b[1] * m[2][1] - m[1][1] * b[2]);
  S d1 = m[0][0] * (b[1] * m[2][2] - m[1][2] * b[2]) - b[0] * c01 +
         m[0][2] * (m[1][0] * b[2] - b[1] * m[2][0]);
  S d2 = m[0][0] * (m[1][1] * b[2] - b[1] * m[2][1]) -
         m[0][1] * (m[1][0] * b[2] - b[1] * m[2][0]) + b[0] * c02;
  x[0] = d0 * idet;
  x[1] = d1 * idet;
  x[2] = d2 * idet;
}

// Solve, per node, the 3x3 system with rows given by three covector fields and
// a constant right-hand side. Used for dual-frame extraction.
template <class S>
VecT<S> dual_solve(const FormT<S>& r0, const FormT<S>& r1, const FormT<S>& r2,
                   std::array<cplx, 3> rhs) {
  const Chart& ch = *r0.chart;
  if (ch.nforms != 3) throw Error("dual_solve needs a 3-dimensional coframe");
  VecT<S> out(r0.chart);
  const long long n = (long long)ch.nodes();
  auto body = [&](long long i) {
    S m[3][3], b[3], x[3];
    for (int a = 0; a < 3; ++a) {
      m[0][a] = r0.c[a].v[i];
      m[1][a] = r1.c[a].v[i];
      m[2][a] = r2.c[a].v[i];
    }
    for (int a = 0; a < 3; ++a) {
      if constexpr (std::is_same_v<S, cplx>) b[a] = rhs[a];
      else b[a] = Jet(ch.jet_vars, ch.jet_order, rhs[a]);
    }
    cramer3_point(m, b, x);
    for (int a = 0; a < 3; ++a) out.c[a].v[i] = x[a];
  };
  if constexpr (std::is_same_v<S, cplx>) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) body(i);
  } else {
    for (long long i = 0; i < n; ++i) body(i);
  }
  return out;
}

// ---- Reeb field ----------------------------------------------------------------

// Reeb vector of a contact form on a 3-dimensional coframe chart: the kernel
// direction of dtheta (exact, by the antisymmetric 3x3 kernel formula),
// normalized by theta(T) = 1. theta(T~) is also the theta ^ dtheta top
// coefficient, so its magnitude doubles as the contact nondegeneracy check.
template <class S>
VecT<S> reeb_field(const FormT<S>& theta, const FormT<S>& dtheta,
                   double degeneracy_tol = 1e-10) {
  const Chart& ch = *theta.chart;
  if (ch.nforms != 3) throw Error("reeb_field needs a 3-dimensional coframe");
  VecT<S> t(theta.chart);
  // components of dtheta: c[0] = d01, c[1] = d02, c[2] = d12
  t.c[0] = dtheta.c[2];
  t.c[1] = scale(dtheta.c[1], -1.0);
  t.c[2] = dtheta.c[0];
  FieldT<S> norm = eval1(theta, t);
  double mn = 1e300;
  for (auto& z : norm.v) mn = std::min(mn, abs0(z));
  if (mn < degeneracy_tol) throw Error("degenerate contact form: |theta ^ dtheta| below threshold");
  FieldT<S> inv = recipf(norm);
  for (int a = 0; a < 3; ++a) t.c[a] = mul(inv, t.c[a]);
  return t;
}

// ---- admissible coframe ----------------------------------------------------------

// Rescale a raw (1,0) coframe candidate by the positive factor making
// dtheta = i theta^1 ^ theta^1bar hold pointwise. Phase is kept from the input.
template <class S>
struct AdmissibleResult {
  FormT<S> theta1;
  FieldT<S> factor;       // the applied scale
  double residual_T;      // max |theta1_raw(T)|
  double residual_imh;    // max |Im h| before the rescale
};

template <class S>
AdmissibleResult<S> admissible_coframe(const FormT<S>& theta, const FormT<S>& theta1_raw,
                                       const VecT<S>* reeb_opt = nullptr,
                                       double t_tol = 1e-6) {
  FormT<S> dtheta = exterior_d(theta);
  VecT<S> T = reeb_opt ? *reeb_opt : reeb_field(theta, dtheta);

  FieldT<S> tT = eval1(theta1_raw, T);
  double rT = max_abs(tT);
  if (rT > t_tol) throw Error("raw coframe does not annihilate the Reeb field");

  FormT<S> t1c = conjform(theta1_raw);
  VecT<S> B = dual_solve(theta, theta1_raw, t1c, {cplx(0), cplx(1), cplx(0)});
  FieldT<S> h = scale(eval2(dtheta, B, conjv(B)), cplx(0.0, -1.0));
  FieldT<S> hr = realf(h);
  double imh = max_abs(imagf(h));
  double mn = 1e300;
  for (auto& z : hr.v) {
    if constexpr (std::is_same_v<S, cplx>) mn = std::min(mn, z.real());
    else mn = std::min(mn, z.value().real());
  }
  if (mn <= 0.0) throw Error("degenerate contact form: Levi factor not positive");

  AdmissibleResult<S> res;
  res.factor = sqrtf_(hr);
  res.theta1 = fmul(res.factor, theta1_raw);
  res.residual_T = rT;
  res.residual_imh = imh;
  return res;
}

// ---- solved structure -------------------------------------------------------------

struct StructResiduals {
  double normalization = 0.0;   // || dtheta - i theta1 ^ theta1bar || on frame pairs
  double structure_eq = 0.0;    // recomputed structure-equation residual
  double omega_reality = 0.0;   // projected-away real part of omega(T)
  double curvature_eq = 0.0;    // torsion cross-check in d(omega)
  double imW = 0.0;
};

template <class S>
struct StructureT {
  ChartPtr chart;
  FormT<S> theta, theta1;
  VecT<S> T, Z1;
  FieldT<S> w0, w1, w1b;    // omega(T), omega(Z1), omega(Z1bar)
  FormT<S> omega;
  FieldT<S> A11;            // weight +2
  FieldT<S> A11b;           // conj, weight -2
  FieldT<S> W;              // weight 0 (real part enforced)
  double vol_sign = 1.0;
  StructResiduals res;

  FormT<S> volume() const {  // theta ^ dtheta
    return wedge(theta, exterior_d(theta));
  }
};

using Structure = StructureT<cplx>;
using JetStructure = StructureT<Jet>;

enum class CovDir { d1, d1bar, d0 };

template <class S>
FieldT<S> covariant_derivative(const StructureT<S>& st, const FieldT<S>& C, CovDir dir) {
  const int k = C.weight;
  switch (dir) {
    case CovDir::d1: {
      FieldT<S> out = apply_vec(st.Z1, C);
      if (k != 0) axpy(out, cplx(-double(k)), mul(st.w1, C));
      out.weight = k + 1;
      return out;
    }
    case CovDir::d1bar: {
      FieldT<S> out = apply_vec(conjv(st.Z1), C);
      if (k != 0) axpy(out, cplx(-double(k)), mul(st.w1b, C));
      out.weight = k - 1;
      return out;
    }
    case CovDir::d0: {
      FieldT<S> out = apply_vec(st.T, C);
      if (k != 0) axpy(out, cplx(-double(k)), mul(st.w0, C));
      out.weight = k;
      return out;
    }
  }
  throw Error("unreachable");
}

// iterated covariant derivative, indices applied left to right
template <class S>
FieldT<S> covd(const StructureT<S>& st, FieldT<S> C, std::initializer_list<CovDir> dirs) {
  for (CovDir d : dirs) C = covariant_derivative(st, C, d);
  return C;
}

// Expand a 2-form on the frame pairs (T,Z1), (T,Z1bar), (Z1,Z1bar).
template <class S>
struct FramePairs {
  FieldT<S> c01, c01b, c11b;
};

template <class S>
FramePairs<S> frame_pairs(const FormT<S>& w, const VecT<S>& T, const VecT<S>& Z1) {
  FramePairs<S> out;
  VecT<S> Z1b = conjv(Z1);
  out.c01 = eval2(w, T, Z1);
  out.c01b = eval2(w, T, Z1b);
  out.c11b = eval2(w, Z1, Z1b);
  return out;
}

// Solve the structure equation for connection, torsion and curvature.
// Frames are derived from (theta, theta1) on 3-dimensional coframe charts and
// must be supplied for ambient (4-leg) charts.
template <class S>
StructureT<S> solve_structure(const FormT<S>& theta, const FormT<S>& theta1,
                              const VecT<S>* T_opt = nullptr,
                              const VecT<S>* Z1_opt = nullptr) {
  StructureT<S> st;
  st.chart = theta.chart;
  st.theta = theta;
  st.theta1 = theta1;

  FormT<S> dtheta = exterior_d(theta);
  if (T_opt && Z1_opt) {
    st.T = *T_opt;
    st.Z1 = *Z1_opt;
  } else {
    st.T = reeb_field(theta, dtheta);
    FormT<S> t1c = conjform(theta1);
    st.Z1 = dual_solve(theta, theta1, t1c, {cplx(0), cplx(1), cplx(0)});
  }

  // normalization residual on frame pairs
  {
    FormT<S> n21 = sub(dtheta, scale(wedge(theta1, conjform(theta1)), cplx(0, 1)));
    FramePairs<S> p = frame_pairs(n21, st.T, st.Z1);
    st.res.normalization =
        std::max({max_abs(p.c01), max_abs(p.c01b), max_abs(p.c11b)});
  }

  FormT<S> dtheta1 = exterior_d(theta1);
  FramePairs<S> p = frame_pairs(dtheta1, st.T, st.Z1);
  // dtheta1 = c01 theta ^ theta1 + c01b theta ^ theta1bar + c11b theta1 ^ theta1bar

  st.A11b = p.c01b;                 // A^1_{1bar} = A_{1bar 1bar}
  st.A11b.weight = -2;
  st.A11 = conjf(st.A11b);

  st.res.omega_reality = max_abs(realf(p.c01));
  st.w0 = scale(imagf(p.c01), cplx(0, -1));   // w0 = -c01, real part projected away
  st.w1b = p.c11b;
  st.w1 = scale(conjf(p.c11b), -1.0);
  st.w0.weight = st.w1.weight = st.w1b.weight = 0;

  st.omega = add(fmul(st.w0, st.theta),
                 add(fmul(st.w1, st.theta1), fmul(st.w1b, conjform(st.theta1))));

  // recomputed structure-equation residual
  {
    FormT<S> rhs = add(wedge(theta1, st.omega),
                       fmul(st.A11b, wedge(theta, conjform(theta1))));
    FramePairs<S> q = frame_pairs(sub(dtheta1, rhs), st.T, st.Z1);
    st.res.structure_eq = std::max({max_abs(q.c01), max_abs(q.c01b), max_abs(q.c11b)});
  }

  // curvature from d(omega)
  FormT<S> domega = exterior_d(st.omega);
  FramePairs<S> q = frame_pairs(domega, st.T, st.Z1);
  st.res.imW = max_abs(imagf(q.c11b));
  st.W = realf(q.c11b);
  st.W.weight = 0;

  // cross-check: the theta ^ theta1 part of d(omega) against A11 covariant data
  {
    FieldT<S> a1b = covariant_derivative(st, st.A11, CovDir::d1bar);
    // d(omega) = W theta1^theta1bar + i A11,1b theta1^theta - i A11b,1 theta1bar^theta
    // contracted: d(omega)(T,Z1) = -i A11,1b and d(omega)(T,Z1bar) = +i conj(A11,1b)
    FieldT<S> r1 = add(q.c01, scale(a1b, cplx(0, 1)));
    FieldT<S> r2 = sub(q.c01b, scale(conjf(a1b), cplx(0, 1)));
    st.res.curvature_eq = std::max(max_abs(r1), max_abs(r2));
  }

  // orientation of the contact volume (grid charts)
  if (st.chart->kind == ChartKind::periodic3 || st.chart->kind == ChartKind::invariant2 ||
      st.chart->kind == ChartKind::nil3) {
    if constexpr (std::is_same_v<S, cplx>) {
      double v = integrate_top(st.volume());
      st.vol_sign = (v < 0) ? -1.0 : 1.0;
    }
  }
  return st;
}

// Contact-volume integral of a scalar field, positively oriented.
inline double structure_integral(const Structure& st, const Field& f) {
  return st.vol_sign * integrate(f, st.volume());
}

// complex L2 pairing <a, b> = integral a conj(b) dvol
inline cplx structure_pairing(const Structure& st, const Field& a, const Field& b) {
  Field p = mul_raw(a, conjf(b));
  Field re = realf(p), im = imagf(p);
  return cplx(structure_integral(st, re), structure_integral(st, im));
}

// ---- contact form rescale -----------------------------------------------------

template <class S>
FieldT<S> expf_(const FieldT<S>& a) {
  FieldT<S> out(a.chart, 0);
  pointwise(out, [&](S& o, long long i) {
    if constexpr (std::is_same_v<S, cplx>) o = std::exp(a.v[i]);
    else o = a.v[i].exp();
  });
  return out;
}

// theta~ = e^{2f} theta with the same CR structure: the new coframe is the
// normalized annihilator of {T~, Z1bar}, phase-matched to theta1 through the
// condition theta1~(Z1) > 0 real before scaling.
template <class S>
StructureT<S> rescale_contact_form(const StructureT<S>& st, const FieldT<S>& f) {
  if (st.chart->nforms != 3)
    throw Error("rescale_contact_form needs an intrinsic 3-dimensional chart");
  FieldT<S> e2f = expf_(scale(f, 2.0));
  FormT<S> theta_new = fmul(e2f, st.theta);
  FormT<S> dtheta_new = exterior_d(theta_new);
  VecT<S> T_new = reeb_field(theta_new, dtheta_new);

  // raw coframe: annihilates T~ and Z1bar, normalized against Z1
  VecT<S> Z1b = conjv(st.Z1);
  FormT<S> raw(st.chart, 1);
  {
    // rows are vectors here: solve beta_a with beta(T~)=0, beta(Z1b)=0, beta(Z1)=1
    const Chart& ch = *st.chart;
    const long long n = (long long)ch.nodes();
    auto body = [&](long long i) {
      S m[3][3], b[3], x[3];
      for (int a = 0; a < 3; ++a) {
        m[0][a] = T_new.c[a].v[i];
        m[1][a] = Z1b.c[a].v[i];
        m[2][a] = st.Z1.c[a].v[i];
      }
      for (int a = 0; a < 3; ++a) {
        cplx rhs = (a == 2) ? cplx(1) : cplx(0);
        if constexpr (std::is_same_v<S, cplx>) b[a] = rhs;
        else b[a] = Jet(ch.jet_vars, ch.jet_order, rhs);
      }
      cramer3_point(m, b, x);
      for (int a = 0; a < 3; ++a) raw.c[a].v[i] = x[a];
    };
    if constexpr (std::is_same_v<S, cplx>) {
#pragma omp parallel for schedule(static)
      for (long long i = 0; i < n; ++i) body(i);
    } else {
      for (long long i = 0; i < n; ++i) body(i);
    }
  }

  auto adm = admissible_coframe(theta_new, raw, &T_new);
  return solve_structure(theta_new, adm.theta1);
}

} // namespace crlab
