#pragma once

#include <complex>
#include <vector>
#include "crlab/fields/chart.hpp"

namespace crlab {

using cplx = std::complex<double>;

namespace fft {

// Spectral first derivative along one fourier axis of a row-major grid array.
// Nyquist mode of the derivative is zeroed. Periods come from the chart.
void axis_deriv(const Chart& ch, int axis, const cplx* in, cplx* out);

// 4th-order finite differences along a time axis (one-sided at the ends).
void axis_deriv_fd(const Chart& ch, int axis, const cplx* in, cplx* out);

// 2/3-rule truncation along every fourier axis, in place.
void dealias(const Chart& ch, cplx* data);

// Forward transform along all fourier axes (unnormalized), and its inverse
// (normalized). Non-fourier axes are left untouched.
void forward_all(const Chart& ch, const cplx* in, cplx* out);
void inverse_all(const Chart& ch, const cplx* in, cplx* out);

// Trigonometric evaluation of a gridded field at off-grid coordinates.
// `coords` holds, per point, the coordinate along each fourier axis; values
// along non-fourier axes are taken from `fixed_index` (usually a slice).
std::vector<cplx> eval_at(const Chart& ch, const cplx* data,
                          const std::vector<std::array<double, 4>>& coords);

} // namespace fft

namespace ref {

// Serial reference implementations: naive O(n^2) DFT differentiation and a
// plain-loop dealias mask. Kept for testing the fast path and benchmarks.
void axis_deriv(const Chart& ch, int axis, const cplx* in, cplx* out);
void dealias(const Chart& ch, cplx* data);

} // namespace ref

} // namespace crlab
