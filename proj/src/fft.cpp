#include "crlab/fields/fft.hpp"

#include <fftw3.h>
#include <omp.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>

namespace crlab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

class PlanCache {
public:
  static PlanCache& instance() {
    static PlanCache c;
    return c;
  }

  PlanPair get(int n) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    PlanPair p;
    std::vector<fftw_complex> buf(n);
    p.fwd = fftw_plan_dft_1d(n, buf.data(), buf.data(), FFTW_FORWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft_1d(n, buf.data(), buf.data(), FFTW_BACKWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_[n] = p;
    return p;
  }

private:
  std::mutex mu_;
  std::map<int, PlanPair> plans_;
};

inline double wavenumber(int j, int n, double period) {
  int k = (j <= n / 2) ? j : j - n;
  return kTwoPi * double(k) / period;
}

// Apply `line_op` to every 1D line along `axis`; gathers into a contiguous
// buffer so one FFTW plan per length serves all strides.
template <class F>
void for_each_line(const Chart& ch, int axis, const cplx* in, cplx* out, F line_op) {
  const int n = ch.axes[axis].n;
  const std::size_t stride = ch.stride(axis);
  const std::size_t total = ch.nodes();
  const std::size_t nlines = total / std::size_t(n);
  const std::size_t block = stride * std::size_t(n);

#pragma omp parallel
  {
    std::vector<cplx> buf(n);
#pragma omp for schedule(static)
    for (long long li = 0; li < (long long)nlines; ++li) {
      const std::size_t outer = std::size_t(li) / stride;
      const std::size_t inner = std::size_t(li) % stride;
      const std::size_t base = outer * block + inner;
      for (int j = 0; j < n; ++j) buf[j] = in[base + std::size_t(j) * stride];
      line_op(buf.data());
      for (int j = 0; j < n; ++j) out[base + std::size_t(j) * stride] = buf[j];
    }
  }
}

} // namespace

namespace fft {

void axis_deriv(const Chart& ch, int axis, const cplx* in, cplx* out) {
  const int n = ch.axes[axis].n;
  const double L = ch.axes[axis].length;
  PlanPair plans = PlanCache::instance().get(n);
  for_each_line(ch, axis, in, out, [&](cplx* line) {
    fftw_execute_dft(plans.fwd, reinterpret_cast<fftw_complex*>(line),
                     reinterpret_cast<fftw_complex*>(line));
    for (int j = 0; j < n; ++j) {
      double k = (j == n / 2) ? 0.0 : wavenumber(j, n, L);
      line[j] *= cplx(0.0, k) / double(n);
    }
    fftw_execute_dft(plans.bwd, reinterpret_cast<fftw_complex*>(line),
                     reinterpret_cast<fftw_complex*>(line));
  });
}

void axis_deriv_fd(const Chart& ch, int axis, const cplx* in, cplx* out) {
  const int n = ch.axes[axis].n;
  if (n < 5) throw Error("time axis needs >= 5 nodes for 4th-order differences");
  const double h = ch.axes[axis].dx();
  for_each_line(ch, axis, in, out, [&](cplx* f) {
    std::vector<cplx> d(n);
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
    for (int j = 2; j < n - 2; ++j)
      d[j] = (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) / (12.0 * h);
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / (12.0 * h);
    d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / (12.0 * h);
    std::memcpy(f, d.data(), sizeof(cplx) * n);
  });
}

void dealias(const Chart& ch, cplx* data) {
  for (int axis = 0; axis < ch.naxes(); ++axis) {
    if (ch.axes[axis].kind != AxisKind::fourier) continue;
    const int n = ch.axes[axis].n;
    const int kmax = n / 3;
    PlanPair plans = PlanCache::instance().get(n);
    for_each_line(ch, axis, data, data, [&](cplx* line) {
      fftw_execute_dft(plans.fwd, reinterpret_cast<fftw_complex*>(line),
                       reinterpret_cast<fftw_complex*>(line));
      for (int j = 0; j < n; ++j) {
        int k = (j <= n / 2) ? j : j - n;
        line[j] = (std::abs(k) > kmax) ? cplx(0.0) : line[j] / double(n);
      }
      fftw_execute_dft(plans.bwd, reinterpret_cast<fftw_complex*>(line),
                       reinterpret_cast<fftw_complex*>(line));
    });
  }
}

void forward_all(const Chart& ch, const cplx* in, cplx* out) {
  if (in != out) std::memcpy(out, in, sizeof(cplx) * ch.nodes());
  for (int axis = 0; axis < ch.naxes(); ++axis) {
    if (ch.axes[axis].kind != AxisKind::fourier) continue;
    PlanPair plans = PlanCache::instance().get(ch.axes[axis].n);
    for_each_line(ch, axis, out, out, [&](cplx* line) {
      fftw_execute_dft(plans.fwd, reinterpret_cast<fftw_complex*>(line),
                       reinterpret_cast<fftw_complex*>(line));
    });
  }
}

void inverse_all(const Chart& ch, const cplx* in, cplx* out) {
  if (in != out) std::memcpy(out, in, sizeof(cplx) * ch.nodes());
  for (int axis = 0; axis < ch.naxes(); ++axis) {
    if (ch.axes[axis].kind != AxisKind::fourier) continue;
    const int n = ch.axes[axis].n;
    PlanPair plans = PlanCache::instance().get(n);
    for_each_line(ch, axis, out, out, [&](cplx* line) {
      fftw_execute_dft(plans.bwd, reinterpret_cast<fftw_complex*>(line),
                       reinterpret_cast<fftw_complex*>(line));
      for (int j = 0; j < n; ++j) line[j] /= double(n);
    });
  }
}

std::vector<cplx> eval_at(const Chart& ch, const cplx* data,
                          const std::vector<std::array<double, 4>>& coords) {
  // full spectrum once, then direct mode sums per point
  std::vector<cplx> hat(ch.nodes());
  forward_all(ch, data, hat.data());
  const int na = ch.naxes();
  double norm = 1.0;
  for (int a = 0; a < na; ++a)
    if (ch.axes[a].kind == AxisKind::fourier) norm *= double(ch.axes[a].n);

  std::vector<cplx> out(coords.size());
#pragma omp parallel for schedule(static)
  for (long long p = 0; p < (long long)coords.size(); ++p) {
    cplx acc = 0.0;
    for (std::size_t idx = 0; idx < hat.size(); ++idx) {
      if (hat[idx] == cplx(0.0)) continue;
      double phase = 0.0;
      std::size_t rem = idx;
      for (int a = na - 1; a >= 0; --a) {
        int j = int(rem % std::size_t(ch.axes[a].n));
        rem /= std::size_t(ch.axes[a].n);
        if (ch.axes[a].kind != AxisKind::fourier) continue;
        double k = wavenumber(j, ch.axes[a].n, ch.axes[a].length);
        phase += k * (coords[p][a] - ch.axes[a].origin);
      }
      acc += hat[idx] * std::polar(1.0, phase);
    }
    out[p] = acc / norm;
  }
  return out;
}

} // namespace fft

namespace ref {

void axis_deriv(const Chart& ch, int axis, const cplx* in, cplx* out) {
  const int n = ch.axes[axis].n;
  const double L = ch.axes[axis].length;
  const std::size_t stride = ch.stride(axis);
  const std::size_t total = ch.nodes();
  const std::size_t nlines = total / std::size_t(n);
  const std::size_t block = stride * std::size_t(n);
  std::vector<cplx> hat(n), buf(n);
  for (std::size_t li = 0; li < nlines; ++li) {
    const std::size_t base = (li / stride) * block + (li % stride);
    for (int j = 0; j < n; ++j) buf[j] = in[base + std::size_t(j) * stride];
    for (int k = 0; k < n; ++k) {
      cplx s = 0.0;
      for (int j = 0; j < n; ++j)
        s += buf[j] * std::polar(1.0, -kTwoPi * double(k) * double(j) / double(n));
      hat[k] = s;
    }
    for (int j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < n; ++k) {
        double kk = (k == n / 2) ? 0.0 : wavenumber(k, n, L);
        s += hat[k] * cplx(0.0, kk) * std::polar(1.0, kTwoPi * double(k) * double(j) / double(n));
      }
      out[base + std::size_t(j) * stride] = s / double(n);
    }
  }
}

void dealias(const Chart& ch, cplx* data) {
  for (int axis = 0; axis < ch.naxes(); ++axis) {
    if (ch.axes[axis].kind != AxisKind::fourier) continue;
    const int n = ch.axes[axis].n;
    const int kmax = n / 3;
    const std::size_t stride = ch.stride(axis);
    const std::size_t nlines = ch.nodes() / std::size_t(n);
    const std::size_t block = stride * std::size_t(n);
    std::vector<cplx> hat(n), buf(n);
    for (std::size_t li = 0; li < nlines; ++li) {
      const std::size_t base = (li / stride) * block + (li % stride);
      for (int j = 0; j < n; ++j) buf[j] = data[base + std::size_t(j) * stride];
      for (int k = 0; k < n; ++k) {
        cplx s = 0.0;
        for (int j = 0; j < n; ++j)
          s += buf[j] * std::polar(1.0, -kTwoPi * double(k) * double(j) / double(n));
        int kk = (k <= n / 2) ? k : k - n;
        hat[k] = (std::abs(kk) > kmax) ? cplx(0.0) : s;
      }
      for (int j = 0; j < n; ++j) {
        cplx s = 0.0;
        for (int k = 0; k < n; ++k)
          s += hat[k] * std::polar(1.0, kTwoPi * double(k) * double(j) / double(n));
        data[base + std::size_t(j) * stride] = s / double(n);
      }
    }
  }
}

} // namespace ref

} // namespace crlab
