#pragma once

#include <array>
#include <string>
#include <vector>
#include <memory>
#include <stdexcept>
#include <cstdint>

namespace crlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ChartKind { periodic3, invariant2, nil3, spacetime, pointset };
enum class AxisKind { fourier, time_fd };

struct Axis {
  std::string name;
  int n = 0;
  double length = 0.0;   // period for fourier axes, interval length for time axes
  double origin = 0.0;
  AxisKind kind = AxisKind::fourier;
  double dx() const { return kind == AxisKind::fourier ? length / n : length / (n - 1); }
};

// One term of d(sigma^a) = sum coef * sigma^b ^ sigma^c  (b < c)
struct StructTerm {
  int a, b, c;
  double coef;
};

// A chart fixes the sample set, the 1-form basis sigma^a used for component
// storage, and how fields are differentiated along each basis direction.
// Grid charts use coordinate or left-invariant coframes with spectral/FD
// derivatives; pointset charts store jets and differentiate exactly.
class Chart {
public:
  ChartKind kind = ChartKind::periodic3;
  std::vector<Axis> axes;              // grid axes, row-major (last fastest)
  int nforms = 3;                      // size of the 1-form basis
  std::vector<std::string> form_names;
  std::vector<int> form_axis;          // basis direction -> axis index, -1 = analytic zero
  std::vector<StructTerm> dsigma;      // structure constants of the coframe
  bool heis_frame = false;             // direction 2 differentiates as E2 = d_y - x d_t
  double fiber = 0.0;                  // invariant2: analytic fiber length

  // pointset charts
  int jet_vars = 0;
  int jet_order = 0;
  std::vector<std::array<double, 4>> points;

  std::size_t nodes() const {
    if (kind == ChartKind::pointset) return points.size();
    std::size_t n = 1;
    for (auto& a : axes) n *= std::size_t(a.n);
    return n;
  }

  int naxes() const { return int(axes.size()); }

  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int a = naxes() - 1; a > axis; --a) s *= std::size_t(axes[a].n);
    return s;
  }

  // coordinate of node `idx` along `axis`
  double coord(std::size_t idx, int axis) const {
    std::size_t s = stride(axis);
    std::size_t i = (idx / s) % std::size_t(axes[axis].n);
    return axes[axis].origin + double(i) * axes[axis].dx();
  }

  double cell_volume() const {
    double v = 1.0;
    for (auto& a : axes)
      if (a.kind == AxisKind::fourier) v *= a.dx();
    return v;
  }

  bool is_grid() const { return kind != ChartKind::pointset; }

  bool same(const Chart& o) const { return this == &o; }
};

using ChartPtr = std::shared_ptr<const Chart>;

inline void validate_periodic_axis(const Axis& a) {
  if (a.n < 8 || a.n % 2 != 0)
    throw Error("periodic axis '" + a.name + "' needs >= 8 nodes, even count");
}

ChartPtr make_periodic3(std::array<int, 3> n, std::array<double, 3> periods);
ChartPtr make_invariant2(int nx, int ny, std::array<double, 2> periods, double fiber);
ChartPtr make_nil3(std::array<int, 3> n, std::array<double, 3> periods);
ChartPtr make_spacetime(const Chart& space, int nt, double t0, double t1);
ChartPtr make_pointset(std::vector<std::array<double, 4>> pts, int jet_vars, int jet_order);

} // namespace crlab
