#include "crlab/geom/identities.hpp"

namespace crlab {

double lie_transport_residual(const Structure& st, const Vec& X,
                              const std::vector<Field>& N, double eps,
                              int max_samples) {
  const Chart& ch = *st.chart;
  if (ch.kind != ChartKind::periodic3)
    throw Error("grid Lie transport check supports periodic3 charts");

  auto M = J_matrix(st);

  // displacement along coordinate axes (frame legs are coordinate directions)
  std::array<const Field*, 3> disp{};
  for (int a = 0; a < 3; ++a) disp[ch.form_axis[a]] = &X.c[a];

  // Jacobian of the displacement
  std::array<std::array<Field, 3>, 3> jac;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) jac[r][c] = dirderiv(*disp[r], c);

  const std::size_t total = ch.nodes();
  const std::size_t step = std::max<std::size_t>(1, total / std::size_t(max_samples));
  std::vector<std::size_t> samples;
  for (std::size_t i = 0; i < total; i += step) samples.push_back(i);

  std::vector<std::array<double, 4>> plus, minus;
  for (std::size_t i : samples) {
    std::array<double, 4> p{}, q{};
    for (int ax = 0; ax < 3; ++ax) {
      double x = ch.coord(i, ax);
      double d = disp[ax]->v[i].real();
      p[ax] = x + eps * d;
      q[ax] = x - eps * d;
    }
    plus.push_back(p);
    minus.push_back(q);
  }

  std::vector<std::vector<cplx>> mplus(9), mminus(9);
  for (int e = 0; e < 9; ++e) {
    mplus[e] = eval_field_at(M[e], plus);
    mminus[e] = eval_field_at(M[e], minus);
  }

  double res = 0.0;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    std::size_t i = samples[s];
    cplx mp[3][3], mm[3][3], jc[3][3], tg[3][3], th[3], tp[3], z1[3];
    for (int r = 0; r < 3; ++r) {
      th[r] = st.theta.c[r].v[i];
      tp[r] = st.T.c[r].v[i];
      z1[r] = st.Z1.c[r].v[i];
      for (int c = 0; c < 3; ++c) {
        mp[r][c] = mplus[r * 3 + c][s];
        mm[r][c] = mminus[r * 3 + c][s];
        tg[r][c] = N[r * 3 + c].v[i];
        jc[r][c] = jac[r][c].v[i];
      }
    }
    res = std::max(res, transport_detail::pullback_residual(mp, mm, jc, eps, tg, th, tp, z1));
  }
  return res;
}

double reeb_transport_residual(const Structure& st, double eps, int max_samples) {
  return lie_transport_residual(st, st.T, JA2_matrix(st), eps, max_samples);
}

double reeb_transport_residual(const JetStructure& st, double eps) {
  const Chart& ch = *st.chart;
  if (ch.kind != ChartKind::pointset || ch.jet_vars != 3)
    throw Error("jet Reeb transport check needs a 3-variable pointset chart");

  auto M = J_matrix(st);
  auto N = JA2_matrix(st);

  double res = 0.0;
  for (std::size_t i = 0; i < ch.nodes(); ++i) {
    std::array<double, 4> dp{}, dm{};
    for (int a = 0; a < 3; ++a) {
      double d = st.T.c[a].v[i].value().real();
      dp[a] = eps * d;
      dm[a] = -eps * d;
    }
    cplx mp[3][3], mm[3][3], jc[3][3], tg[3][3], th[3], tp[3], z1[3];
    for (int r = 0; r < 3; ++r) {
      th[r] = st.theta.c[r].v[i].value();
      tp[r] = st.T.c[r].v[i].value();
      z1[r] = st.Z1.c[r].v[i].value();
      for (int c = 0; c < 3; ++c) {
        mp[r][c] = M[r * 3 + c].v[i].eval_shift(dp);
        mm[r][c] = M[r * 3 + c].v[i].eval_shift(dm);
        jc[r][c] = st.T.c[r].v[i].deriv(c).value();
        tg[r][c] = N[r * 3 + c].v[i].value();
      }
    }
    res = std::max(res, transport_detail::pullback_residual(mp, mm, jc, eps, tg, th, tp, z1));
  }
  return res;
}

} // namespace crlab
