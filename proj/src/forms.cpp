#include "crlab/fields/forms.hpp"

namespace crlab {

double integrate_top(const Form& w) {
  const Chart& ch = *w.chart;
  if (w.deg != ch.nforms) throw Error("integrate needs a top-degree form");
  if (ch.kind != ChartKind::periodic3 && ch.kind != ChartKind::invariant2 &&
      ch.kind != ChartKind::nil3)
    throw Error("integration is defined on periodic3/invariant2 charts");

  const Field& f = w.c[0];
  cplx acc = 0.0;
  for (auto& z : f.v) acc += z;
  double mean_re = acc.real() / double(f.v.size());

  double vol = 1.0;
  for (auto& ax : ch.axes) vol *= ax.length;
  if (ch.kind == ChartKind::invariant2) vol *= ch.fiber;
  return mean_re * vol;
}

} // namespace crlab
