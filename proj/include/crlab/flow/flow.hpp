#pragma once

#include <functional>
#include <optional>

#include "crlab/ops/operators.hpp"

namespace crlab {

enum class FlowKind { torsion, cartan, gauge_fixed, coupled_torsion };

inline const char* flow_kind_name(FlowKind k) {
  switch (k) {
    case FlowKind::torsion: return "torsion";
    case FlowKind::cartan: return "cartan";
    case FlowKind::gauge_fixed: return "gauge-fixed";
    case FlowKind::coupled_torsion: return "coupled-torsion";
  }
  return "?";
}

struct DiagnosticsRecord {
  double t = 0;
  double normA = 0;
  double normQ = 0;
  double energy = 0;
  double res21 = 0;   // normalization residual of the assembled structure
  double res24 = 0;   // curvature-equation cross-check
  double extra = 0;   // torsion-consistency error for the Cartan kind
  bool finite() const {
    for (double v : {t, normA, normQ, energy, res21, res24, extra})
      if (!std::isfinite(v)) return false;
    return true;
  }
};

// Evolving state: J(t) through the deformation pair (alpha, beta) against a
// frozen base coframe, theta(t) = e^{2 lambda} theta0, and the reference
// endomorphism K captured at t = 0 as a coordinate-basis matrix.
template <class S>
struct FlowStateT {
  double t = 0;
  StructureT<S> base;
  FieldT<S> alpha, beta, lambda;
  std::vector<FieldT<S>> Kmat;
  bool has_K = false;
  std::vector<DiagnosticsRecord> history;
};

using FlowState = FlowStateT<cplx>;

template <class S>
FlowStateT<S> make_flow_state(StructureT<S> base) {
  FlowStateT<S> s;
  s.base = std::move(base);
  s.alpha = constant<S>(s.base.chart, 1.0);
  s.beta = FieldT<S>(s.base.chart, 0);
  s.lambda = FieldT<S>(s.base.chart, 0);
  return s;
}

template <class S>
void freeze_reference(FlowStateT<S>& s) {
  // K = J at capture time, stored frame-independently
  EndoT<S> j;
  j.e11 = FieldT<S>(s.base.chart, 2);
  j.e11b = constant<S>(s.base.chart, cplx(0, 1));
  s.Kmat = endo_matrix(s.base, j);
  s.has_K = true;
}

// frame of the deformed coframe: Z1(beta) = conj(alpha) Z1 - conj(beta) Z1bar
template <class S>
VecT<S> deformed_frame(const StructureT<S>& base, const FieldT<S>& alpha,
                       const FieldT<S>& beta) {
  VecT<S> z(base.chart);
  VecT<S> zb = conjv(base.Z1);
  FieldT<S> ac = conjf(alpha), bc = conjf(beta);
  for (int a = 0; a < base.chart->nforms; ++a)
    z.c[a] = sub(mul(ac, base.Z1.c[a]), mul(bc, zb.c[a]));
  return z;
}

// Assemble and solve the structure carried by a flow state.
template <class S>
StructureT<S> assemble_structure(const FlowStateT<S>& s) {
  FormT<S> t1 = add(fmul(s.alpha, s.base.theta1),
                    fmul(s.beta, conjform(s.base.theta1)));
  VecT<S> z1 = deformed_frame(s.base, s.alpha, s.beta);
  StructureT<S> st = solve_structure(s.base.theta, t1, &s.base.T, &z1);
  if (max_abs(s.lambda) > 0.0) {
    if constexpr (std::is_same_v<S, cplx>) {
      st = rescale_contact_form(st, realf(s.lambda));
    } else {
      throw Error("contact-factor coupling is supported on grid charts");
    }
  }
  return st;
}

struct FlowRhsOptions {
  FlowKind kind = FlowKind::torsion;
};

// Right-hand side of d(J)/dt = 2E plus the contact-factor rate when coupled.
template <class S>
struct FlowRhs {
  EndoT<S> E;
  std::optional<FieldT<S>> h;
};

template <class S>
FlowRhs<S> flow_rhs(const StructureT<S>& st, FlowKind kind,
                    const std::vector<FieldT<S>>* Kmat) {
  FlowRhs<S> r;
  switch (kind) {
    case FlowKind::torsion:
      r.E = torsion_velocity(st);
      break;
    case FlowKind::cartan:
      r.E = cartan_velocity(st);
      break;
    case FlowKind::gauge_fixed: {
      if (!Kmat) throw Error("gauge-fixed flow needs the frozen reference K");
      EndoT<S> K = endo_from_matrix(st, *Kmat);
      FieldT<S> F = op_FJ(st, K);
      EndoT<S> gauge = op_DJ(st, F);
      r.E = endo_add(cartan_velocity(st), endo_scale(gauge, -1.0 / 12.0));
      break;
    }
    case FlowKind::coupled_torsion:
      r.E = torsion_velocity(st);
      r.h = st.W;
      break;
  }
  return r;
}

// min grid spacing, for the step-size guards
inline double min_dx(const Chart& ch) {
  double h = 1e300;
  for (auto& ax : ch.axes)
    if (ax.kind == AxisKind::fourier) h = std::min(h, ax.dx());
  return h;
}

struct StepGuards {
  double c1 = 0.5;    // dt <= c1 h   for first-order flows
  double c4 = 0.02;   // dt <= c4 h^4 for fourth-order flows
};

inline double max_stable_dt(const Chart& ch, FlowKind kind, StepGuards g = {}) {
  if (ch.kind == ChartKind::pointset) return 1e300;  // analytic data, no grid CFL
  double h = min_dx(ch);
  switch (kind) {
    case FlowKind::torsion:
    case FlowKind::coupled_torsion:
      return g.c1 * h;
    case FlowKind::cartan:
    case FlowKind::gauge_fixed:
      return g.c4 * h * h * h * h;
  }
  return 0;
}

struct FlowAbort : Error {
  using Error::Error;
};

namespace flow_detail {

template <class S>
struct Deriv {
  FieldT<S> da, db, dl;
};

template <class S>
void renormalize(FieldT<S>& alpha, FieldT<S>& beta) {
  // |alpha|^2 - |beta|^2 = 1, re-enforced after every stage
  FieldT<S> n = sqrtf_(realf(sub(mul_raw(alpha, conjf(alpha)), mul_raw(beta, conjf(beta)))));
  FieldT<S> inv = recipf(n);
  alpha = mul_raw(alpha, inv);
  beta = mul_raw(beta, inv);
}

template <class S>
Deriv<S> state_derivative(const FlowStateT<S>& s, const FieldT<S>& alpha,
                          const FieldT<S>& beta, const FieldT<S>& lambda,
                          FlowKind kind, StructureT<S>* out_structure = nullptr) {
  FlowStateT<S> tmp;
  tmp.base = s.base;
  tmp.alpha = alpha;
  tmp.beta = beta;
  tmp.lambda = lambda;
  StructureT<S> st = assemble_structure(tmp);
  FlowRhs<S> r = flow_rhs(st, kind, s.has_K ? &s.Kmat : nullptr);
  FieldT<S> v = coframe_velocity(r.E);  // theta1' = v theta1bar
  Deriv<S> d;
  d.da = mul(v, conjf(beta));
  d.db = mul(v, conjf(alpha));
  d.dl = r.h ? *r.h : FieldT<S>(s.base.chart, 0);
  if (out_structure) *out_structure = std::move(st);
  return d;
}

} // namespace flow_detail

// One classical 4-stage explicit step. Each stage re-solves the structure;
// afterwards the gauge (alpha real positive, |alpha|^2 - |beta|^2 = 1) is
// re-enforced and diagnostics are appended.
template <class S>
void flow_step(FlowStateT<S>& s, double dt, FlowKind kind,
               double abort_residual = 1e-3) {
  using flow_detail::renormalize;
  using flow_detail::state_derivative;

  auto stage = [&](const FieldT<S>& a, const FieldT<S>& b, const FieldT<S>& l,
                   StructureT<S>* out = nullptr) {
    FieldT<S> an = a, bn = b;
    renormalize(an, bn);
    return state_derivative(s, an, bn, l, kind, out);
  };

  StructureT<S> st0;
  auto k1 = stage(s.alpha, s.beta, s.lambda, &st0);
  auto at = [&](const FieldT<S>& f, const FieldT<S>& df, double c) {
    FieldT<S> out = f;
    axpy(out, c, df);
    return out;
  };
  auto k2 = stage(at(s.alpha, k1.da, dt / 2), at(s.beta, k1.db, dt / 2),
                  at(s.lambda, k1.dl, dt / 2));
  auto k3 = stage(at(s.alpha, k2.da, dt / 2), at(s.beta, k2.db, dt / 2),
                  at(s.lambda, k2.dl, dt / 2));
  auto k4 = stage(at(s.alpha, k3.da, dt), at(s.beta, k3.db, dt),
                  at(s.lambda, k3.dl, dt));

  auto combine = [&](FieldT<S>& y, const FieldT<S>& d1, const FieldT<S>& d2,
                     const FieldT<S>& d3, const FieldT<S>& d4) {
    axpy(y, dt / 6, d1);
    axpy(y, dt / 3, d2);
    axpy(y, dt / 3, d3);
    axpy(y, dt / 6, d4);
  };
  combine(s.alpha, k1.da, k2.da, k3.da, k4.da);
  combine(s.beta, k1.db, k2.db, k3.db, k4.db);
  combine(s.lambda, k1.dl, k2.dl, k3.dl, k4.dl);
  s.t += dt;

  // gauge: rotate alpha to the positive real axis, then project the modulus
  {
    FieldT<S> phase(s.base.chart, 0);
    pointwise(phase, [&](S& o, long long i) {
      if constexpr (std::is_same_v<S, cplx>) {
        cplx a = s.alpha.v[i];
        o = (std::abs(a) == 0.0) ? cplx(1.0) : std::conj(a) / std::abs(a);
      } else {
        cplx a = s.alpha.v[i].value();
        cplx ph = (std::abs(a) == 0.0) ? cplx(1.0) : std::conj(a) / std::abs(a);
        o = s.alpha.v[i] * 0.0 + ph;  // constant jet
      }
    });
    s.alpha = mul_raw(s.alpha, phase);
    s.beta = mul_raw(s.beta, phase);
    FieldT<S> one = constant<S>(s.base.chart, 1.0);
    s.alpha = sqrtf_(realf(add(one, mul_raw(s.beta, conjf(s.beta)))));
    s.alpha.weight = 0;
  }

  // diagnostics on the accepted state
  StructureT<S> st = assemble_structure(s);
  DiagnosticsRecord rec;
  rec.t = s.t;
  rec.normA = max_abs(st.A11);
  rec.normQ = max_abs(cartan_tensor(st));
  if constexpr (std::is_same_v<S, cplx>) {
    if (st.chart->is_grid() && st.chart->kind != ChartKind::spacetime)
      rec.energy = action_energy(st);
  }
  rec.res21 = st.res.normalization;
  rec.res24 = st.res.curvature_eq;
  if (kind == FlowKind::cartan || kind == FlowKind::gauge_fixed) {
    // torsion-consistency: (A(t+dt) - A(t))/dt vs -Q,0 at the step start
    FieldT<S> qdot = covariant_derivative(st0, cartan_tensor(st0), CovDir::d0);
    FieldT<S> fd = scale(sub(st.A11, st0.A11), 1.0 / dt);
    rec.extra = max_abs(add(fd, qdot));
  }
  if (!rec.finite()) throw FlowAbort("flow diagnostics are not finite");
  if (rec.res21 > abort_residual) throw FlowAbort("structure residual blow-up");
  s.history.push_back(rec);
}

struct RunResult {
  std::string termination = "completed";
  std::vector<double> slice_times;
  std::vector<Structure> slices;   // snapshots for the ambient construction
};

// Iterate flow_step; optional snapshot stride collects solved structures.
// On abort the state is rewound to the last healthy step before returning.
template <class S>
RunResult run_flow(FlowStateT<S>& s, FlowKind kind, double dt, int steps,
                   int snapshot_every = 0, double abort_residual = 1e-3) {
  RunResult out;
  auto snap = [&]() {
    if constexpr (std::is_same_v<S, cplx>) {
      out.slice_times.push_back(s.t);
      out.slices.push_back(assemble_structure(s));
    }
  };
  if (snapshot_every > 0) snap();
  for (int k = 0; k < steps; ++k) {
    double t_prev = s.t;
    FieldT<S> a_prev = s.alpha, b_prev = s.beta, l_prev = s.lambda;
    try {
      flow_step(s, dt, kind, abort_residual);
    } catch (const FlowAbort& e) {
      s.t = t_prev;
      s.alpha = std::move(a_prev);
      s.beta = std::move(b_prev);
      s.lambda = std::move(l_prev);
      out.termination = e.what();
      return out;
    }
    if (snapshot_every > 0 && (k + 1) % snapshot_every == 0) snap();
  }
  return out;
}

} // namespace crlab
