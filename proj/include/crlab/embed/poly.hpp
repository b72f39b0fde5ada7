#pragma once

#include <complex>
#include <vector>

#include "crlab/fields/jet.hpp"

namespace crlab {

// Polynomials in (z1, z1bar, z2, z2bar) with complex coefficients: exact
// ambient evaluators for defining functions, test functions and closed-form
// frames on hypersurfaces in C^2.
class Poly {
public:
  struct Term {
    int p1, q1, p2, q2;  // exponents of z1, z1bar, z2, z2bar
    cplx coef;
  };

  Poly() = default;
  explicit Poly(cplx c) {
    if (c != cplx(0)) terms_.push_back({0, 0, 0, 0, c});
  }

  static Poly var(int which) {  // 0: z1, 1: z1bar, 2: z2, 3: z2bar
    Poly p;
    Term t{0, 0, 0, 0, 1.0};
    (which == 0 ? t.p1 : which == 1 ? t.q1 : which == 2 ? t.p2 : t.q2) = 1;
    p.terms_.push_back(t);
    return p;
  }

  const std::vector<Term>& terms() const { return terms_; }

  cplx eval(cplx z1, cplx z2) const {
    cplx s = 0.0;
    for (const Term& t : terms_) {
      cplx m = t.coef;
      for (int k = 0; k < t.p1; ++k) m *= z1;
      for (int k = 0; k < t.q1; ++k) m *= std::conj(z1);
      for (int k = 0; k < t.p2; ++k) m *= z2;
      for (int k = 0; k < t.q2; ++k) m *= std::conj(z2);
      s += m;
    }
    return s;
  }

  // Wirtinger derivatives
  Poly d(int which) const {
    Poly out;
    for (Term t : terms_) {
      int& e = (which == 0 ? t.p1 : which == 1 ? t.q1 : which == 2 ? t.p2 : t.q2);
      if (e == 0) continue;
      t.coef *= double(e);
      e -= 1;
      out.terms_.push_back(t);
    }
    return out;
  }

  Poly conj() const {
    Poly out;
    for (Term t : terms_) {
      std::swap(t.p1, t.q1);
      std::swap(t.p2, t.q2);
      t.coef = std::conj(t.coef);
      out.terms_.push_back(t);
    }
    return out;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    Poly out = a;
    out.terms_.insert(out.terms_.end(), b.terms_.begin(), b.terms_.end());
    out.compress();
    return out;
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (b * cplx(-1.0)); }
  friend Poly operator*(const Poly& a, cplx s) {
    Poly out = a;
    for (auto& t : out.terms_) t.coef *= s;
    return out;
  }
  friend Poly operator*(cplx s, const Poly& a) { return a * s; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly out;
    for (const Term& x : a.terms_)
      for (const Term& y : b.terms_)
        out.terms_.push_back(
            {x.p1 + y.p1, x.q1 + y.q1, x.p2 + y.p2, x.q2 + y.q2, x.coef * y.coef});
    out.compress();
    return out;
  }

  // exact jet at a point, in the real coordinates (x1, y1, x2, y2)
  Jet to_jet(int order, cplx z1, cplx z2) const {
    const cplx i(0, 1);
    Jet x1 = Jet::variable(4, order, 0, z1.real());
    Jet y1 = Jet::variable(4, order, 1, z1.imag());
    Jet x2 = Jet::variable(4, order, 2, z2.real());
    Jet y2 = Jet::variable(4, order, 3, z2.imag());
    Jet jz1 = x1 + y1 * i, jz1b = x1 - y1 * i;
    Jet jz2 = x2 + y2 * i, jz2b = x2 - y2 * i;
    Jet s(4, order, 0.0);
    for (const Term& t : terms_) {
      Jet m(4, order, t.coef);
      for (int k = 0; k < t.p1; ++k) m = m * jz1;
      for (int k = 0; k < t.q1; ++k) m = m * jz1b;
      for (int k = 0; k < t.p2; ++k) m = m * jz2;
      for (int k = 0; k < t.q2; ++k) m = m * jz2b;
      s += m;
    }
    return s;
  }

private:
  void compress() {
    std::vector<Term> out;
    for (const Term& t : terms_) {
      bool merged = false;
      for (Term& o : out)
        if (o.p1 == t.p1 && o.q1 == t.q1 && o.p2 == t.p2 && o.q2 == t.q2) {
          o.coef += t.coef;
          merged = true;
          break;
        }
      if (!merged) out.push_back(t);
    }
    terms_.clear();
    for (const Term& t : out)
      if (std::abs(t.coef) > 0.0) terms_.push_back(t);
  }

  std::vector<Term> terms_;
};

inline Poly poly_z1() { return Poly::var(0); }
inline Poly poly_z1b() { return Poly::var(1); }
inline Poly poly_z2() { return Poly::var(2); }
inline Poly poly_z2b() { return Poly::var(3); }

inline Poly poly_re(const Poly& p) { return (p + p.conj()) * cplx(0.5); }

} // namespace crlab
