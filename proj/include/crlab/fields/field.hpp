#pragma once

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "crlab/fields/chart.hpp"
#include "crlab/fields/fft.hpp"
#include "crlab/fields/jet.hpp"

namespace crlab {

// Complex scalar field on a chart. `weight` is the covariant-calculus index
// count carried through conjugation (negated) and products (added).
template <class S>
struct FieldT {
  ChartPtr chart;
  int weight = 0;
  std::vector<S> v;

  FieldT() = default;
  FieldT(ChartPtr ch, int w = 0) : chart(std::move(ch)), weight(w) {
    if constexpr (std::is_same_v<S, Jet>)
      v.assign(chart->nodes(), Jet(chart->jet_vars, chart->jet_order, 0.0));
    else
      v.assign(chart->nodes(), S(0.0));
  }

  std::size_t size() const { return v.size(); }
  S& operator[](std::size_t i) { return v[i]; }
  const S& operator[](std::size_t i) const { return v[i]; }
};

using Field = FieldT<cplx>;
using JetField = FieldT<Jet>;

namespace detail {
inline void check_same_chart(const Chart& a, const Chart& b) {
  if (&a != &b) throw Error("fields live on different charts");
}
} // namespace detail

// ---- pointwise kernels -----------------------------------------------------
// cplx fields go through OpenMP loops; jet fields through plain loops (point
// sets are small and jet ops dominate anyway).

template <class S, class F>
void pointwise(FieldT<S>& out, F f) {
  if constexpr (std::is_same_v<S, cplx>) {
    const long long n = (long long)out.v.size();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) f(out.v[i], i);
  } else {
    for (long long i = 0; i < (long long)out.v.size(); ++i) f(out.v[i], i);
  }
}

template <class S>
FieldT<S> add(const FieldT<S>& a, const FieldT<S>& b) {
  detail::check_same_chart(*a.chart, *b.chart);
  FieldT<S> out(a.chart, a.weight);
  pointwise(out, [&](S& o, long long i) { o = a.v[i] + b.v[i]; });
  return out;
}

template <class S>
FieldT<S> sub(const FieldT<S>& a, const FieldT<S>& b) {
  detail::check_same_chart(*a.chart, *b.chart);
  FieldT<S> out(a.chart, a.weight);
  pointwise(out, [&](S& o, long long i) { o = a.v[i] - b.v[i]; });
  return out;
}

template <class S>
FieldT<S> scale(const FieldT<S>& a, cplx s) {
  FieldT<S> out(a.chart, a.weight);
  pointwise(out, [&](S& o, long long i) { o = a.v[i] * s; });
  return out;
}

template <class S>
void axpy(FieldT<S>& y, cplx a, const FieldT<S>& x) {
  detail::check_same_chart(*y.chart, *x.chart);
  pointwise(y, [&](S& o, long long i) { o += x.v[i] * a; });
}

template <class S>
FieldT<S> conjf(const FieldT<S>& a) {
  FieldT<S> out(a.chart, -a.weight);
  pointwise(out, [&](S& o, long long i) {
    if constexpr (std::is_same_v<S, cplx>) o = std::conj(a.v[i]);
    else o = a.v[i].conj();
  });
  return out;
}

// product without dealiasing; building block for mul()
template <class S>
FieldT<S> mul_raw(const FieldT<S>& a, const FieldT<S>& b) {
  detail::check_same_chart(*a.chart, *b.chart);
  FieldT<S> out(a.chart, a.weight + b.weight);
  pointwise(out, [&](S& o, long long i) { o = a.v[i] * b.v[i]; });
  return out;
}

template <class S>
void dealias_inplace(FieldT<S>& a) {
  if constexpr (std::is_same_v<S, cplx>) {
    if (a.chart->is_grid()) fft::dealias(*a.chart, a.v.data());
  }
  // jets are exact polynomials in local coordinates: nothing to truncate
}

// pointwise product followed by the 2/3-rule truncation; quadratic terms on
// grids alias otherwise
template <class S>
FieldT<S> mul(const FieldT<S>& a, const FieldT<S>& b) {
  FieldT<S> out = mul_raw(a, b);
  dealias_inplace(out);
  return out;
}

template <class S>
FieldT<S> recipf(const FieldT<S>& a) {
  FieldT<S> out(a.chart, -a.weight);
  pointwise(out, [&](S& o, long long i) {
    if constexpr (std::is_same_v<S, cplx>) o = 1.0 / a.v[i];
    else o = a.v[i].recip();
  });
  return out;
}

template <class S>
FieldT<S> sqrtf_(const FieldT<S>& a) {
  FieldT<S> out(a.chart, a.weight);
  pointwise(out, [&](S& o, long long i) {
    if constexpr (std::is_same_v<S, cplx>) o = std::sqrt(a.v[i]);
    else o = a.v[i].sqrt();
  });
  return out;
}

template <class S>
FieldT<S> realf(const FieldT<S>& a) {
  FieldT<S> out(a.chart, 0);
  pointwise(out, [&](S& o, long long i) {
    if constexpr (std::is_same_v<S, cplx>) o = a.v[i].real();
    else o = (a.v[i] + a.v[i].conj()) * 0.5;
  });
  return out;
}

template <class S>
FieldT<S> imagf(const FieldT<S>& a) {
  FieldT<S> out(a.chart, 0);
  pointwise(out, [&](S& o, long long i) {
    if constexpr (std::is_same_v<S, cplx>) o = a.v[i].imag();
    else o = (a.v[i] - a.v[i].conj()) * cplx(0.0, -0.5);
  });
  return out;
}

template <class S>
FieldT<S> constant(ChartPtr ch, cplx value, int weight = 0) {
  FieldT<S> out(std::move(ch), weight);
  pointwise(out, [&](S& o, long long) {
    if constexpr (std::is_same_v<S, cplx>) o = value;
    else o = Jet(out.chart->jet_vars, out.chart->jet_order, value);
  });
  return out;
}

// ---- reductions (serial on purpose: bit-reproducible) ----------------------

template <class S>
double max_abs(const FieldT<S>& a) {
  double m = 0.0;
  for (auto& x : a.v) m = std::max(m, abs0(x));
  return m;
}

inline double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
  return m;
}

// plain l2 pairing sum a * conj(b); volume weights are applied by callers
inline cplx dot(const Field& a, const Field& b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) s += a.v[i] * std::conj(b.v[i]);
  return s;
}

// ---- frame-direction derivative --------------------------------------------

// Derivative of a field along basis direction `dir` of the chart coframe,
// i.e. application of the dual frame vector E_dir. On Heisenberg-frame charts
// direction 2 is E2 = d/dy - x d/dt.
template <class S>
FieldT<S> dirderiv(const FieldT<S>& f, int dir) {
  const Chart& ch = *f.chart;
  if (dir < 0 || dir >= ch.nforms) throw Error("no such frame direction");
  FieldT<S> out(f.chart, f.weight);
  if constexpr (std::is_same_v<S, Jet>) {
    int axis = ch.form_axis[dir];
    if (axis < 0) return out;
    for (std::size_t i = 0; i < f.v.size(); ++i) out.v[i] = f.v[i].deriv(axis);
    return out;
  } else {
    if (!ch.is_grid()) throw Error("pointset charts carry jets; plain fields have no derivative callback");
    int axis = ch.form_axis[dir];
    if (axis < 0) return out;  // analytic direction: derivative vanishes
    if (ch.axes[axis].kind == AxisKind::fourier)
      fft::axis_deriv(ch, axis, f.v.data(), out.v.data());
    else
      fft::axis_deriv_fd(ch, axis, f.v.data(), out.v.data());
    if (ch.heis_frame && dir == 2) {
      // E2 = d/dy - x d/dt; the t term exists only when the fiber is gridded
      int taxis = ch.form_axis[0];
      if (taxis >= 0) {
        FieldT<S> ft(f.chart, f.weight);
        fft::axis_deriv(ch, taxis, f.v.data(), ft.v.data());
        int xaxis = ch.form_axis[1];
        pointwise(out, [&](S& o, long long i) {
          o -= ch.coord(std::size_t(i), xaxis) * ft.v[i];
        });
      }
    }
    return out;
  }
}

// coordinate function of a chart axis, as a field (pointset charts get the
// full jet of the coordinate)
template <class S>
FieldT<S> coordinate_field(ChartPtr ch, int axis) {
  FieldT<S> out(ch, 0);
  if constexpr (std::is_same_v<S, Jet>) {
    for (std::size_t i = 0; i < out.v.size(); ++i)
      out.v[i] = Jet::variable(ch->jet_vars, ch->jet_order, axis, ch->points[i][axis]);
  } else {
    pointwise(out, [&](S& o, long long i) { o = ch->coord(std::size_t(i), axis); });
  }
  return out;
}

// ---- seeded band-limited random fields --------------------------------------

// Random field with spectrum confined to |k_axis| <= kmax per fourier axis,
// mildly decaying amplitudes. Real output when `real_valued`.
Field random_band_limited(ChartPtr ch, std::uint64_t seed, int kmax,
                          bool real_valued = false, int weight = 0);

inline std::vector<cplx> eval_field_at(const Field& f,
                                       const std::vector<std::array<double, 4>>& coords) {
  return fft::eval_at(*f.chart, f.v.data(), coords);
}

} // namespace crlab
