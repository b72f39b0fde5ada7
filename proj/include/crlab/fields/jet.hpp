#pragma once

// Truncated multivariate Taylor arithmetic ("jets") over 2..4 real variables.
// Fields on pointset charts carry a jet per sample point, so repeated frame
// differentiation stays exact instead of degrading like finite differences.

#include <complex>
#include <vector>
#include <array>
#include <cmath>
#include <cassert>
#include <memory>
#include <stdexcept>

namespace crlab {

using cplx = std::complex<double>;

namespace jet_detail {

// Enumeration of multi-indices with |alpha| <= order over nv variables,
// graded lexicographic. Tables are small and cached per (nv, order).
struct IndexTable {
  int nv = 0, order = 0;
  std::vector<std::array<int, 4>> alpha;       // exponent vectors
  std::vector<int> total;                      // |alpha|
  // position lookup: dense map over mixed-radix key (order+1)^nv
  std::vector<int> pos;
  int key(const std::array<int, 4>& a) const {
    int k = 0;
    for (int v = 0; v < nv; ++v) k = k * (order + 1) + a[v];
    return k;
  }
  int find(const std::array<int, 4>& a) const {
    for (int v = 0; v < nv; ++v)
      if (a[v] < 0 || a[v] > order) return -1;
    int t = 0;
    for (int v = 0; v < nv; ++v) t += a[v];
    if (t > order) return -1;
    return pos[key(a)];
  }
};

inline const IndexTable& table(int nv, int order) {
  // pointer stability across insertions matters: callers hold several tables at once
  static thread_local std::vector<std::unique_ptr<IndexTable>> cache;
  for (auto& t : cache)
    if (t->nv == nv && t->order == order) return *t;
  IndexTable t;
  t.nv = nv;
  t.order = order;
  std::array<int, 4> a{0, 0, 0, 0};
  // enumerate by total degree
  for (int deg = 0; deg <= order; ++deg) {
    // iterate all exponent vectors with sum == deg
    std::vector<std::array<int, 4>> cur;
    a.fill(0);
    // simple odometer over nv slots
    std::array<int, 4> e{0, 0, 0, 0};
    while (true) {
      int s = 0;
      for (int v = 0; v < nv; ++v) s += e[v];
      if (s == deg) cur.push_back(e);
      // increment
      int v = nv - 1;
      while (v >= 0) {
        if (++e[v] > deg) { e[v] = 0; --v; } else break;
      }
      if (v < 0) break;
    }
    for (auto& ev : cur) {
      t.alpha.push_back(ev);
      t.total.push_back(deg);
    }
  }
  int keyspan = 1;
  for (int v = 0; v < nv; ++v) keyspan *= (order + 1);
  t.pos.assign(keyspan, -1);
  for (size_t i = 0; i < t.alpha.size(); ++i) t.pos[t.key(t.alpha[i])] = int(i);
  cache.push_back(std::make_unique<IndexTable>(std::move(t)));
  return *cache.back();
}

} // namespace jet_detail

class Jet {
public:
  Jet() = default;
  Jet(int nv, int order, cplx value = 0.0) : nv_(nv), order_(order) {
    c_.assign(jet_detail::table(nv, order).alpha.size(), cplx(0.0));
    c_[0] = value;
  }

  static Jet variable(int nv, int order, int var, double value) {
    Jet j(nv, order, value);
    std::array<int, 4> e{0, 0, 0, 0};
    e[var] = 1;
    int p = jet_detail::table(nv, order).find(e);
    if (p >= 0) j.c_[p] = 1.0;
    return j;
  }

  int nvars() const { return nv_; }
  int order() const { return order_; }
  cplx value() const { return c_.empty() ? cplx(0.0) : c_[0]; }
  const std::vector<cplx>& coeffs() const { return c_; }
  std::vector<cplx>& coeffs() { return c_; }

  // partial derivative w.r.t. variable `var`; result order drops by one
  Jet deriv(int var) const {
    if (order_ == 0) return Jet(nv_, 0, 0.0);
    const auto& src = jet_detail::table(nv_, order_);
    const auto& dst = jet_detail::table(nv_, order_ - 1);
    Jet out(nv_, order_ - 1);
    for (size_t i = 0; i < dst.alpha.size(); ++i) {
      auto a = dst.alpha[i];
      a[var] += 1;
      int p = src.find(a);
      out.c_[i] = c_[p] * double(a[var]);
    }
    return out;
  }

  Jet conj() const {
    Jet out = *this;
    for (auto& z : out.c_) z = std::conj(z);
    return out;
  }

  // Coefficients are monomial coefficients around the expansion point:
  // f(p + d) = sum_alpha c_alpha d^alpha.
  cplx eval_shift(const std::array<double, 4>& d) const {
    const auto& t = jet_detail::table(nv_, order_);
    cplx s = 0.0;
    for (size_t i = 0; i < c_.size(); ++i) {
      if (c_[i] == cplx(0.0)) continue;
      double m = 1.0;
      for (int v = 0; v < nv_; ++v)
        for (int k = 0; k < t.alpha[i][v]; ++k) m *= d[v];
      s += c_[i] * m;
    }
    return s;
  }

  Jet& operator+=(const Jet& o) { bin(o, +1.0); return *this; }
  Jet& operator-=(const Jet& o) { bin(o, -1.0); return *this; }
  Jet& operator+=(cplx z) { c_[0] += z; return *this; }
  Jet& operator-=(cplx z) { c_[0] -= z; return *this; }
  Jet& operator*=(cplx z) { for (auto& a : c_) a *= z; return *this; }

  friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
  friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
  friend Jet operator+(Jet a, cplx b) { a += b; return a; }
  friend Jet operator-(Jet a, cplx b) { a -= b; return a; }
  friend Jet operator-(Jet a) { a *= -1.0; return a; }
  friend Jet operator*(Jet a, cplx b) { a *= b; return a; }
  friend Jet operator*(cplx b, Jet a) { a *= b; return a; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    int nv = a.nv_;
    int order = std::min(a.order_, b.order_);
    const auto& ta = jet_detail::table(nv, a.order_);
    const auto& tb = jet_detail::table(nv, b.order_);
    const auto& to = jet_detail::table(nv, order);
    Jet out(nv, order);
    // monomial-coefficient convention, so multiplication is plain convolution
    for (size_t i = 0; i < ta.alpha.size(); ++i) {
      if (ta.total[i] > order || a.c_[i] == cplx(0.0)) continue;
      for (size_t j = 0; j < tb.alpha.size(); ++j) {
        int tot = ta.total[i] + tb.total[j];
        if (tot > order) continue;
        if (b.c_[j] == cplx(0.0)) continue;
        std::array<int, 4> g{0, 0, 0, 0};
        for (int v = 0; v < nv; ++v) g[v] = ta.alpha[i][v] + tb.alpha[j][v];
        out.c_[to.find(g)] += a.c_[i] * b.c_[j];
      }
    }
    return out;
  }

  // reciprocal via geometric series around the constant term
  Jet recip() const {
    cplx f0 = c_[0];
    if (std::abs(f0) < 1e-300) throw std::domain_error("jet recip at zero");
    Jet rest = *this;
    rest.c_[0] = 0.0;
    rest *= (1.0 / f0);           // rest = (f - f0)/f0, nilpotent
    Jet acc(nv_, order_, 1.0);
    Jet term(nv_, order_, 1.0);
    for (int k = 1; k <= order_; ++k) {
      term = term * rest;
      term *= -1.0;
      acc += term;
    }
    acc *= (1.0 / f0);
    return acc;
  }

  Jet sqrt() const {
    cplx f0 = std::sqrt(c_[0]);
    if (std::abs(f0) < 1e-300) throw std::domain_error("jet sqrt at zero");
    Jet rest = *this;
    rest.c_[0] = 0.0;
    rest *= (1.0 / c_[0]);
    // binomial series (1+u)^{1/2}
    Jet acc(nv_, order_, 1.0);
    Jet term(nv_, order_, 1.0);
    double coef = 1.0;
    for (int k = 1; k <= order_; ++k) {
      coef *= (0.5 - double(k - 1)) / double(k);
      term = term * rest;
      Jet t = term;
      t *= coef;
      acc += t;
    }
    acc *= f0;
    return acc;
  }

  Jet exp() const {
    cplx e0 = std::exp(c_[0]);
    Jet rest = *this;
    rest.c_[0] = 0.0;
    Jet acc(nv_, order_, 1.0);
    Jet term(nv_, order_, 1.0);
    double fact = 1.0;
    for (int k = 1; k <= order_; ++k) {
      fact /= double(k);
      term = term * rest;
      Jet t = term;
      t *= fact;
      acc += t;
    }
    acc *= e0;
    return acc;
  }

  Jet sin() const {
    const cplx i(0.0, 1.0);
    Jet a = (*this * i).exp();
    Jet b = (*this * (-i)).exp();
    return (a - b) * (1.0 / (2.0 * i));
  }
  Jet cos() const {
    const cplx i(0.0, 1.0);
    Jet a = (*this * i).exp();
    Jet b = (*this * (-i)).exp();
    return (a + b) * 0.5;
  }

private:
  void bin(const Jet& o, double s) {
    if (o.order_ == order_) {
      for (size_t i = 0; i < c_.size(); ++i) c_[i] += s * o.c_[i];
      return;
    }
    // differing truncation orders: clip to the smaller
    int order = std::min(order_, o.order_);
    const auto& tme = jet_detail::table(nv_, order_);
    const auto& tot = jet_detail::table(nv_, o.order_);
    Jet out(nv_, order);
    const auto& to = jet_detail::table(nv_, order);
    for (size_t i = 0; i < to.alpha.size(); ++i) {
      int pa = tme.find(to.alpha[i]);
      int pb = tot.find(to.alpha[i]);
      out.c_[i] = c_[pa] + s * o.c_[pb];
    }
    *this = out;
  }

  int nv_ = 0, order_ = 0;
  std::vector<cplx> c_;
};

inline Jet conj(const Jet& j) { return j.conj(); }
inline double abs0(const Jet& j) { return std::abs(j.value()); }
inline double abs0(const cplx& z) { return std::abs(z); }
inline cplx value0(const Jet& j) { return j.value(); }
inline cplx value0(const cplx& z) { return z; }

} // namespace crlab
