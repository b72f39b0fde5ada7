#include "crlab/fields/field.hpp"

namespace crlab {

Field random_band_limited(ChartPtr ch, std::uint64_t seed, int kmax,
                          bool real_valued, int weight) {
  for (auto& ax : ch->axes)
    if (ax.kind != AxisKind::fourier)
      throw Error("random_band_limited needs an all-periodic chart");

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int na = ch->naxes();
  Field hat(ch, weight);
  for (std::size_t idx = 0; idx < hat.v.size(); ++idx) {
    std::size_t rem = idx;
    double k2 = 0.0;
    bool keep = true;
    for (int a = na - 1; a >= 0; --a) {
      int n = ch->axes[a].n;
      int j = int(rem % std::size_t(n));
      rem /= std::size_t(n);
      int k = (j <= n / 2) ? j : j - n;
      if (std::abs(k) > kmax || j == n / 2) keep = false;
      k2 += double(k) * double(k);
    }
    double amp = keep ? 1.0 / (1.0 + k2) : 0.0;
    hat.v[idx] = amp * cplx(gauss(rng), gauss(rng));
  }
  Field out(ch, weight);
  fft::inverse_all(*ch, hat.v.data(), out.v.data());
  if (real_valued) out = realf(out);
  double m = max_abs(out);
  if (m > 0) out = scale(out, 1.0 / m);
  return out;
}

} // namespace crlab
