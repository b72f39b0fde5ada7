#include "crlab/fields/chart.hpp"

namespace crlab {

ChartPtr make_periodic3(std::array<int, 3> n, std::array<double, 3> periods) {
  auto ch = std::make_shared<Chart>();
  ch->kind = ChartKind::periodic3;
  const char* names[3] = {"x", "y", "z"};
  for (int a = 0; a < 3; ++a) {
    Axis ax{names[a], n[a], periods[a], 0.0, AxisKind::fourier};
    validate_periodic_axis(ax);
    ch->axes.push_back(ax);
  }
  ch->nforms = 3;
  ch->form_names = {"dx", "dy", "dz"};
  ch->form_axis = {0, 1, 2};
  return ch;
}

// Reeb-invariant fields on the Heisenberg nilmanifold: grid over (x, y),
// fiber direction handled analytically (all t-derivatives vanish).
// Coframe basis: sigma0 = dt + x dy, sigma1 = dx, sigma2 = dy with
// d(sigma0) = sigma1 ^ sigma2.
ChartPtr make_invariant2(int nx, int ny, std::array<double, 2> periods, double fiber) {
  auto ch = std::make_shared<Chart>();
  ch->kind = ChartKind::invariant2;
  Axis ax{"x", nx, periods[0], 0.0, AxisKind::fourier};
  Axis ay{"y", ny, periods[1], 0.0, AxisKind::fourier};
  validate_periodic_axis(ax);
  validate_periodic_axis(ay);
  ch->axes = {ax, ay};
  ch->nforms = 3;
  ch->form_names = {"s0", "dx", "dy"};
  ch->form_axis = {-1, 0, 1};
  ch->dsigma = {{0, 1, 2, 1.0}};
  ch->heis_frame = true;
  ch->fiber = fiber;
  return ch;
}

// Full 3D Heisenberg-frame chart; only t-invariant data is spectrally
// consistent here (generic data would need twisted boundary conditions).
ChartPtr make_nil3(std::array<int, 3> n, std::array<double, 3> periods) {
  auto ch = std::make_shared<Chart>();
  ch->kind = ChartKind::nil3;
  Axis at{"t", n[0], periods[0], 0.0, AxisKind::fourier};
  Axis ax{"x", n[1], periods[1], 0.0, AxisKind::fourier};
  Axis ay{"y", n[2], periods[2], 0.0, AxisKind::fourier};
  validate_periodic_axis(at);
  validate_periodic_axis(ax);
  validate_periodic_axis(ay);
  ch->axes = {at, ax, ay};
  ch->nforms = 3;
  ch->form_names = {"s0", "dx", "dy"};
  ch->form_axis = {0, 1, 2};
  ch->dsigma = {{0, 1, 2, 1.0}};
  ch->heis_frame = true;
  return ch;
}

ChartPtr make_spacetime(const Chart& space, int nt, double t0, double t1) {
  if (!space.is_grid()) throw Error("spacetime base must be a grid chart");
  if (nt < 5) throw Error("spacetime needs >= 5 time slices");
  auto ch = std::make_shared<Chart>();
  ch->kind = ChartKind::spacetime;
  // time axis first so that a slice is a contiguous block
  ch->axes.push_back(Axis{"t", nt, t1 - t0, t0, AxisKind::time_fd});
  for (auto& a : space.axes) ch->axes.push_back(a);
  ch->nforms = space.nforms + 1;
  ch->form_names = space.form_names;
  ch->form_names.push_back("dt");
  for (int f : space.form_axis) ch->form_axis.push_back(f < 0 ? -1 : f + 1);
  ch->form_axis.push_back(0);
  ch->dsigma = space.dsigma;
  ch->heis_frame = space.heis_frame;
  ch->fiber = space.fiber;
  return ch;
}

ChartPtr make_pointset(std::vector<std::array<double, 4>> pts, int jet_vars, int jet_order) {
  auto ch = std::make_shared<Chart>();
  ch->kind = ChartKind::pointset;
  ch->points = std::move(pts);
  ch->jet_vars = jet_vars;
  ch->jet_order = jet_order;
  ch->nforms = jet_vars;
  for (int v = 0; v < jet_vars; ++v) ch->form_names.push_back("d" + std::to_string(v));
  for (int v = 0; v < jet_vars; ++v) ch->form_axis.push_back(v);
  return ch;
}

} // namespace crlab
