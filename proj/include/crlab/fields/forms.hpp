#pragma once

#include <array>
#include <memory>
#include <vector>

#include "crlab/fields/field.hpp"

namespace crlab {

namespace forms_detail {

// increasing multi-indices of length `deg` from {0..n-1}
inline const std::vector<std::vector<int>>& combos(int n, int deg) {
  struct Entry {
    int n, deg;
    std::vector<std::vector<int>> list;
  };
  // callers hold several lists at once: entries must stay put on insertion
  static thread_local std::vector<std::unique_ptr<Entry>> cache;
  for (auto& e : cache)
    if (e->n == n && e->deg == deg) return e->list;
  auto entry = std::make_unique<Entry>();
  entry->n = n;
  entry->deg = deg;
  std::vector<int> idx(deg);
  auto rec = [&](auto&& self, int start, int depth) -> void {
    if (depth == deg) {
      entry->list.push_back(idx);
      return;
    }
    for (int i = start; i < n; ++i) {
      idx[depth] = i;
      self(self, i + 1, depth + 1);
    }
  };
  if (deg == 0)
    entry->list.push_back({});
  else
    rec(rec, 0, 0);
  cache.push_back(std::move(entry));
  return cache.back()->list;
}

// sort `ix` ascending; returns permutation sign, 0 on repeats
inline int sort_sign(std::vector<int>& ix) {
  int sign = 1;
  for (size_t i = 1; i < ix.size(); ++i)
    for (size_t j = i; j > 0 && ix[j] < ix[j - 1]; --j) {
      std::swap(ix[j], ix[j - 1]);
      sign = -sign;
    }
  for (size_t i = 1; i < ix.size(); ++i)
    if (ix[i] == ix[i - 1]) return 0;
  return sign;
}

inline int combo_pos(int n, int deg, const std::vector<int>& ix) {
  const auto& list = combos(n, deg);
  for (size_t p = 0; p < list.size(); ++p)
    if (list[p] == ix) return int(p);
  throw Error("bad form index");
}

} // namespace forms_detail

// Differential form of degree `deg`, stored as one component field per
// increasing multi-index of the chart's coframe basis.
template <class S>
struct FormT {
  ChartPtr chart;
  int deg = 0;
  std::vector<FieldT<S>> c;

  FormT() = default;
  FormT(ChartPtr ch, int degree) : chart(ch), deg(degree) {
    const auto& list = forms_detail::combos(ch->nforms, degree);
    for (size_t i = 0; i < list.size(); ++i) c.emplace_back(ch, 0);
  }

  FieldT<S>& comp(std::vector<int> ix) {
    return c[forms_detail::combo_pos(chart->nforms, deg, ix)];
  }
  const FieldT<S>& comp(std::vector<int> ix) const {
    return c[forms_detail::combo_pos(chart->nforms, deg, ix)];
  }
};

using Form = FormT<cplx>;
using JetForm = FormT<Jet>;

// vector field in frame components (contracts against the coframe basis)
template <class S>
struct VecT {
  ChartPtr chart;
  std::vector<FieldT<S>> c;

  VecT() = default;
  explicit VecT(ChartPtr ch) : chart(ch) {
    for (int a = 0; a < ch->nforms; ++a) c.emplace_back(ch, 0);
  }
};

using Vec = VecT<cplx>;
using JetVec = VecT<Jet>;

template <class S>
VecT<S> conjv(const VecT<S>& v) {
  VecT<S> out(v.chart);
  for (int a = 0; a < v.chart->nforms; ++a) out.c[a] = conjf(v.c[a]);
  return out;
}

template <class S>
FormT<S> add(const FormT<S>& a, const FormT<S>& b) {
  if (a.deg != b.deg) throw Error("form degree mismatch");
  FormT<S> out(a.chart, a.deg);
  for (size_t i = 0; i < a.c.size(); ++i) out.c[i] = add(a.c[i], b.c[i]);
  return out;
}

template <class S>
FormT<S> sub(const FormT<S>& a, const FormT<S>& b) {
  if (a.deg != b.deg) throw Error("form degree mismatch");
  FormT<S> out(a.chart, a.deg);
  for (size_t i = 0; i < a.c.size(); ++i) out.c[i] = sub(a.c[i], b.c[i]);
  return out;
}

template <class S>
FormT<S> scale(const FormT<S>& a, cplx s) {
  FormT<S> out(a.chart, a.deg);
  for (size_t i = 0; i < a.c.size(); ++i) out.c[i] = scale(a.c[i], s);
  return out;
}

template <class S>
FormT<S> conjform(const FormT<S>& a) {
  FormT<S> out(a.chart, a.deg);
  for (size_t i = 0; i < a.c.size(); ++i) out.c[i] = conjf(a.c[i]);
  return out;
}

// field * form, pointwise
template <class S>
FormT<S> fmul(const FieldT<S>& f, const FormT<S>& a) {
  FormT<S> out(a.chart, a.deg);
  for (size_t i = 0; i < a.c.size(); ++i) out.c[i] = mul(f, a.c[i]);
  return out;
}

template <class S>
FormT<S> wedge(const FormT<S>& a, const FormT<S>& b) {
  detail::check_same_chart(*a.chart, *b.chart);
  const int n = a.chart->nforms;
  if (a.deg + b.deg > n) throw Error("wedge degree exceeds chart dimension");
  FormT<S> out(a.chart, a.deg + b.deg);
  const auto& la = forms_detail::combos(n, a.deg);
  const auto& lb = forms_detail::combos(n, b.deg);
  for (size_t i = 0; i < la.size(); ++i)
    for (size_t j = 0; j < lb.size(); ++j) {
      std::vector<int> merged = la[i];
      merged.insert(merged.end(), lb[j].begin(), lb[j].end());
      int sign = forms_detail::sort_sign(merged);
      if (sign == 0) continue;
      FieldT<S> prod = mul(a.c[i], b.c[j]);
      auto& dst = out.comp(merged);
      if (sign > 0) {
        pointwise(dst, [&](S& o, long long k) { o += prod.v[k]; });
      } else {
        pointwise(dst, [&](S& o, long long k) { o -= prod.v[k]; });
      }
    }
  return out;
}

template <class S>
FormT<S> exterior_d(const FormT<S>& a) {
  const Chart& ch = *a.chart;
  const int n = ch.nforms;
  if (a.deg >= n) {
    // top-degree forms die one degree up; keep shape by returning a zero form
    return FormT<S>(a.chart, a.deg + 1 > n ? n : a.deg + 1);
  }
  FormT<S> out(a.chart, a.deg + 1);
  const auto& list = forms_detail::combos(n, a.deg);
  for (size_t i = 0; i < list.size(); ++i) {
    // d(f) ^ sigma^I
    for (int dir = 0; dir < n; ++dir) {
      std::vector<int> merged;
      merged.push_back(dir);
      merged.insert(merged.end(), list[i].begin(), list[i].end());
      std::vector<int> sorted = merged;
      int sign = forms_detail::sort_sign(sorted);
      if (sign == 0) continue;
      FieldT<S> df = dirderiv(a.c[i], dir);
      auto& dst = out.comp(sorted);
      if (sign > 0) pointwise(dst, [&](S& o, long long k) { o += df.v[k]; });
      else pointwise(dst, [&](S& o, long long k) { o -= df.v[k]; });
    }
    // f * d(sigma^I) via the structure constants
    for (size_t slot = 0; slot < list[i].size(); ++slot) {
      for (const auto& st : ch.dsigma) {
        if (st.a != list[i][slot]) continue;
        std::vector<int> merged;
        for (size_t s2 = 0; s2 < list[i].size(); ++s2) {
          if (s2 == slot) {
            merged.push_back(st.b);
            merged.push_back(st.c);
          } else {
            merged.push_back(list[i][s2]);
          }
        }
        // sign from moving the replacement into place: d hits slot after
        // passing `slot` earlier factors
        int presign = (slot % 2 == 0) ? 1 : -1;
        std::vector<int> sorted = merged;
        int sign = forms_detail::sort_sign(sorted);
        if (sign == 0) continue;
        sign *= presign;
        auto& dst = out.comp(sorted);
        const auto& src = a.c[i];
        double coef = st.coef;
        if (sign > 0) pointwise(dst, [&](S& o, long long k) { o += coef * src.v[k]; });
        else pointwise(dst, [&](S& o, long long k) { o -= coef * src.v[k]; });
      }
    }
  }
  return out;
}

// ---- frame contractions ------------------------------------------------------

template <class S>
FieldT<S> apply_vec(const VecT<S>& v, const FieldT<S>& f) {
  FieldT<S> out(f.chart, f.weight);
  for (int a = 0; a < f.chart->nforms; ++a) {
    FieldT<S> df = dirderiv(f, a);
    FieldT<S> t = mul_raw(v.c[a], df);
    pointwise(out, [&](S& o, long long k) { o += t.v[k]; });
  }
  dealias_inplace(out);
  return out;
}

template <class S>
FieldT<S> eval1(const FormT<S>& w, const VecT<S>& v) {
  if (w.deg != 1) throw Error("eval1 wants a 1-form");
  FieldT<S> out(w.chart, 0);
  for (int a = 0; a < w.chart->nforms; ++a) {
    FieldT<S> t = mul_raw(w.c[a], v.c[a]);
    pointwise(out, [&](S& o, long long k) { o += t.v[k]; });
  }
  dealias_inplace(out);
  return out;
}

template <class S>
FieldT<S> eval2(const FormT<S>& w, const VecT<S>& u, const VecT<S>& v) {
  if (w.deg != 2) throw Error("eval2 wants a 2-form");
  const int n = w.chart->nforms;
  const auto& list = forms_detail::combos(n, 2);
  FieldT<S> out(w.chart, 0);
  for (size_t i = 0; i < list.size(); ++i) {
    int a = list[i][0], b = list[i][1];
    FieldT<S> t = mul_raw(u.c[a], v.c[b]);
    FieldT<S> t2 = mul_raw(u.c[b], v.c[a]);
    pointwise(out, [&](S& o, long long k) { o += w.c[i].v[k] * (t.v[k] - t2.v[k]); });
  }
  dealias_inplace(out);
  return out;
}

// interior product v -| w
template <class S>
FormT<S> contract(const FormT<S>& w, const VecT<S>& v) {
  if (w.deg == 0) throw Error("cannot contract a 0-form");
  const int n = w.chart->nforms;
  FormT<S> out(w.chart, w.deg - 1);
  const auto& list = forms_detail::combos(n, w.deg);
  for (size_t i = 0; i < list.size(); ++i) {
    for (size_t slot = 0; slot < list[i].size(); ++slot) {
      std::vector<int> rest;
      for (size_t s2 = 0; s2 < list[i].size(); ++s2)
        if (s2 != slot) rest.push_back(list[i][s2]);
      int sign = (slot % 2 == 0) ? 1 : -1;
      FieldT<S> t = mul_raw(v.c[list[i][slot]], w.c[i]);
      auto& dst = out.comp(rest);
      if (sign > 0) pointwise(dst, [&](S& o, long long k) { o += t.v[k]; });
      else pointwise(dst, [&](S& o, long long k) { o -= t.v[k]; });
    }
  }
  for (auto& f : out.c) dealias_inplace(f);
  return out;
}

template <class S>
double max_norm(const FormT<S>& w) {
  double m = 0.0;
  for (auto& f : w.c) m = std::max(m, max_abs(f));
  return m;
}

// ---- integration --------------------------------------------------------------

// Integral of a top-degree form over a periodic grid chart, oriented by the
// coframe basis order. invariant2 charts integrate the analytic fiber as a
// constant factor.
double integrate_top(const Form& w);

// Integral of (scalar field) * (top form).
inline double integrate(const Field& f, const Form& vol) {
  if (vol.deg != vol.chart->nforms) throw Error("integrate needs a top-degree form");
  Form weighted(vol.chart, vol.deg);
  weighted.c[0] = mul_raw(f, vol.c[0]);
  return integrate_top(weighted);
}

} // namespace crlab
