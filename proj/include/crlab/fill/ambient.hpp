#pragma once

#include "crlab/fill/certificate.hpp"

namespace crlab {

// Almost complex structure on M x [t0, t1] determined by a flow history and a
// certificate u per slice: a = 1/Re u, b = -Im u / Re u,
//   Theta1 = theta1(t) + gamma1 dt,   eta = a theta(t) + (b - i) dt,
// with gamma1 = i a^{-1} b,1b - i a^{-2} (b - i) a,1b.
struct AmbientStructure {
  ChartPtr chart;       // spacetime chart, time axis first
  Form Theta1, eta;
  Field a, b;           // on the spacetime chart
};

// gamma1 on one slice from (a, b) real fields
inline Field gamma1_slice(const Structure& st, const Field& a, const Field& b) {
  Field a1b = apply_vec(conjv(st.Z1), a);
  Field b1b = apply_vec(conjv(st.Z1), b);
  Field ia = recipf(a);
  Field ia2 = mul(ia, ia);
  Field bmi = sub(b, constant<cplx>(st.chart, cplx(0, 1)));
  Field out = scale(mul(ia, b1b), cplx(0, 1));
  axpy(out, cplx(0, -1), mul(ia2, mul(bmi, a1b)));
  out.weight = -1;
  return out;
}

// residual of the second integrability relation on one slice:
// gamma1,1b + i E1b1b + a^{-1} (b - i) A1b1b, with gamma1,1b covariant at
// weight -1. Small whenever the certificate equation holds.
inline double relation_dTheta_residual(const Structure& st, const Field& u,
                                       const Field& E11) {
  Field re = realf(u), im = imagf(u);
  Field a = recipf(re);
  Field b = scale(mul(a, im), -1.0);
  Field g1 = gamma1_slice(st, a, b);
  Field g1b = covariant_derivative(st, g1, CovDir::d1bar);
  Field E11b = conjf(E11);
  Field r = add(g1b, scale(E11b, cplx(0, 1)));
  Field bmi = sub(b, constant<cplx>(st.chart, cplx(0, 1)));
  axpy(r, 1.0, mul(mul(recipf(a), bmi), st.A11b));
  return max_abs(r);
}

struct AmbientOptions {
  double margin_delta = 1e-3;
};

// Assemble the spacetime forms from equally spaced flow slices and their
// certificates.
inline AmbientStructure build_ambient(const std::vector<double>& times,
                                      const std::vector<Structure>& slices,
                                      const std::vector<Field>& u,
                                      AmbientOptions opt = {}) {
  if (slices.size() != times.size() || u.size() != times.size())
    throw Error("build_ambient: mismatched history");
  const int nt = int(times.size());
  if (nt < 5) throw Error("build_ambient needs >= 5 slices");
  const double dt0 = times[1] - times[0];
  for (int s = 1; s + 1 < nt; ++s)
    if (std::abs((times[s + 1] - times[s]) - dt0) > 1e-9 * std::abs(dt0))
      throw Error("build_ambient needs equally spaced slices");

  for (const Field& us : u)
    if (certificate_margin(us) < opt.margin_delta)
      throw Error("certificate margin below the configured floor");

  const Chart& space = *slices[0].chart;
  AmbientStructure amb;
  auto chart = make_spacetime(space, nt, times.front(), times.back());
  amb.chart = chart;
  amb.Theta1 = Form(chart, 1);
  amb.eta = Form(chart, 1);
  amb.a = Field(chart, 0);
  amb.b = Field(chart, 0);

  const std::size_t block = space.nodes();
  const int nspace = space.nforms;
  const int dt_leg = nspace;  // time leg is last in the form basis

  for (int s = 0; s < nt; ++s) {
    const Structure& st = slices[s];
    Field re = realf(u[s]), im = imagf(u[s]);
    Field af = recipf(re);
    Field bf = scale(mul(af, im), -1.0);
    Field g1 = gamma1_slice(st, af, bf);
    Field atheta_leg[4];
    for (int l = 0; l < nspace; ++l) atheta_leg[l] = mul(af, st.theta.c[l]);

    for (std::size_t j = 0; j < block; ++j) {
      std::size_t idx = std::size_t(s) * block + j;
      amb.a.v[idx] = af.v[j];
      amb.b.v[idx] = bf.v[j];
      for (int l = 0; l < nspace; ++l) {
        amb.Theta1.c[l].v[idx] = st.theta1.c[l].v[j];
        amb.eta.c[l].v[idx] = atheta_leg[l].v[j];
      }
      amb.Theta1.c[dt_leg].v[idx] = g1.v[j];
      amb.eta.c[dt_leg].v[idx] = bf.v[j] - cplx(0, 1);
    }
  }
  return amb;
}

// (r1, r2) = max |top coefficient| of eta ^ Theta1 ^ d(eta) and
// eta ^ Theta1 ^ d(Theta1) on the spacetime chart.
inline std::pair<double, double> integrability_residuals(const AmbientStructure& amb) {
  Form etp = wedge(amb.eta, amb.Theta1);
  Form r1 = wedge(etp, exterior_d(amb.eta));
  Form r2 = wedge(etp, exterior_d(amb.Theta1));
  return {max_norm(r1), max_norm(r2)};
}

} // namespace crlab
