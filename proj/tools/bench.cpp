// Timing comparison between the OpenMP/FFTW kernels and the serial reference
// implementations, plus the structure-solve pipeline they feed.

#include <omp.h>

#include <chrono>
#include <cstdio>

#include "crlab/geom/catalog.hpp"

using namespace crlab;
using clk = std::chrono::steady_clock;

template <class F>
double time_ms(F fn, int reps) {
  fn();  // warm up (FFT plans)
  auto t0 = clk::now();
  for (int i = 0; i < reps; ++i) fn();
  return std::chrono::duration<double, std::milli>(clk::now() - t0).count() / reps;
}

int main() {
  std::printf("threads: %d\n\n", omp_get_max_threads());
  std::printf("%-34s %10s %10s %8s\n", "kernel", "omp (ms)", "serial", "speedup");

  for (int n : {16, 32, 64}) {
    auto ch = make_periodic3({n, n, n}, {6.2831853071795865, 6.2831853071795865,
                                         6.2831853071795865});
    Field f = random_band_limited(ch, 7, n / 4);
    Field out(ch);

    double fast = time_ms([&] { fft::axis_deriv(*ch, 2, f.v.data(), out.v.data()); }, 5);
    double slow = time_ms([&] { ref::axis_deriv(*ch, 2, f.v.data(), out.v.data()); }, 1);
    std::printf("%-34s %10.3f %10.3f %7.1fx\n",
                ("axis derivative " + std::to_string(n) + "^3").c_str(), fast, slow,
                slow / fast);

    Field g = mul_raw(f, f);
    double fd = time_ms([&] { Field h = g; fft::dealias(*ch, h.v.data()); }, 5);
    double sd = time_ms([&] { Field h = g; ref::dealias(*ch, h.v.data()); }, 1);
    std::printf("%-34s %10.3f %10.3f %7.1fx\n",
                ("dealias " + std::to_string(n) + "^3").c_str(), fd, sd, sd / fd);
  }

  std::printf("\n%-34s %10s\n", "pipeline", "omp (ms)");
  for (int n : {16, 32}) {
    auto g = catalog_t3_roto(1, {n, n, n});
    auto adm = admissible_coframe(g.theta, g.theta1_raw);
    double ms = time_ms([&] { (void)solve_structure(g.theta, adm.theta1); }, 3);
    std::printf("%-34s %10.3f\n",
                ("structure solve " + std::to_string(n) + "^3").c_str(), ms);
  }
  return 0;
}
