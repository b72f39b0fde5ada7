#pragma once

#include "crlab/geom/structure.hpp"

namespace crlab {

// Grid geometries hand back contact form + raw coframe; callers normalize via
// admissible_coframe and run solve_structure.
struct GridGeometry {
  ChartPtr chart;
  Form theta;
  Form theta1_raw;
};

// theta = cos(nz) dx + sin(nz) dy on the 2pi-periodic 3-torus
GridGeometry catalog_t3_roto(int n, std::array<int, 3> res);

// Flat Heisenberg base on a Reeb-invariant 2-torus chart:
// theta = sigma0, theta1 = (sigma1 + i sigma2)/sqrt(2).
Structure catalog_nil_base(int nx, int ny);

// Same base on the full 3D Heisenberg-frame chart (t-invariant data only).
Structure catalog_nil3_base(std::array<int, 3> res);

// single-mode deformation parameter amp * exp(i (mx x + my y)) on a grid chart
Field beta_mode(ChartPtr chart, cplx amp, int mx, int my);

// theta1(beta) = alpha theta1 + beta conj(theta1), alpha = sqrt(1 + |beta|^2).
// The normalization d(theta) = i theta1 ^ theta1bar survives any beta.
template <class S>
FieldT<S> deformation_alpha(const FieldT<S>& beta) {
  FieldT<S> one = constant<S>(beta.chart, 1.0);
  FieldT<S> b2 = mul_raw(beta, conjf(beta));
  return sqrtf_(realf(add(one, b2)));
}

template <class S>
FormT<S> deformed_coframe(const FormT<S>& theta1, const FieldT<S>& alpha,
                          const FieldT<S>& beta) {
  return add(fmul(alpha, theta1), fmul(beta, conjform(theta1)));
}

// Flat Heisenberg model theta = dt + x dy on a pointset chart with exact jets.
struct PointGeometry {
  ChartPtr chart;
  JetForm theta;
  JetForm theta1_raw;
};

PointGeometry catalog_heis_flat(int npts, int jet_order = 6, std::uint64_t seed = 17);

// low-discrepancy points in a box (Halton), used by pointset builders
std::vector<std::array<double, 4>> halton_points(int npts, int dim,
                                                 std::array<double, 4> lo,
                                                 std::array<double, 4> hi,
                                                 std::uint64_t skip = 0);

} // namespace crlab
