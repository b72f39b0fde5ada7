#pragma once

#include <functional>
#include <optional>

#include "crlab/embed/poly.hpp"
#include "crlab/fields/chart.hpp"
#include "crlab/geom/catalog.hpp"

namespace crlab {

// A strongly pseudoconvex hypersurface M = {gamma = 0} in C^2 with ambient
// partial evaluators to order 3. The closed-form (polynomial) path is exact;
// a black-box gamma falls back to central differences with step 1e-4.
class Hypersurface {
public:
  static Hypersurface from_poly(Poly gamma) {
    Hypersurface g;
    g.gamma_ = std::move(gamma);
    g.exact_ = true;
    return g;
  }

  static Hypersurface from_function(std::function<double(cplx, cplx)> fn,
                                    double step = 1e-4) {
    Hypersurface g;
    g.fn_ = std::move(fn);
    g.exact_ = false;
    g.step_ = step;
    return g;
  }

  bool exact() const { return exact_; }
  const char* derivative_path() const { return exact_ ? "closed-form" : "difference"; }

  double gamma(cplx z1, cplx z2) const {
    return exact_ ? gamma_.eval(z1, z2).real() : fn_(z1, z2);
  }

  // Wirtinger derivative of gamma: d1/d1b/d2/d2b applied (a1, b1, a2, b2) times
  cplx dgamma(cplx z1, cplx z2, int a1, int b1, int a2, int b2) const {
    if (exact_) {
      Poly p = gamma_;
      for (int k = 0; k < a1; ++k) p = p.d(0);
      for (int k = 0; k < b1; ++k) p = p.d(1);
      for (int k = 0; k < a2; ++k) p = p.d(2);
      for (int k = 0; k < b2; ++k) p = p.d(3);
      return p.eval(z1, z2);
    }
    return fd_wirtinger(
        [this](cplx w1, cplx w2) { return cplx(fn_(w1, w2), 0.0); }, z1, z2,
        a1, b1, a2, b2, step_);
  }

  // recursive central-difference Wirtinger derivative of an ambient scalar
  template <class F>
  static cplx fd_wirtinger(F f, cplx z1, cplx z2, int a1, int b1, int a2, int b2,
                           double h) {
    int total = a1 + b1 + a2 + b2;
    if (total == 0) return f(z1, z2);
    auto rec = [&](cplx w1, cplx w2, int c1, int d1, int c2, int d2) {
      return fd_wirtinger(f, w1, w2, c1, d1, c2, d2, h);
    };
    const cplx i(0, 1);
    if (a1 > 0)
      return ((rec(z1 + h, z2, a1 - 1, b1, a2, b2) - rec(z1 - h, z2, a1 - 1, b1, a2, b2)) -
              i * (rec(z1 + i * h, z2, a1 - 1, b1, a2, b2) - rec(z1 - i * h, z2, a1 - 1, b1, a2, b2))) /
             (4.0 * h);
    if (b1 > 0)
      return ((rec(z1 + h, z2, a1, b1 - 1, a2, b2) - rec(z1 - h, z2, a1, b1 - 1, a2, b2)) +
              i * (rec(z1 + i * h, z2, a1, b1 - 1, a2, b2) - rec(z1 - i * h, z2, a1, b1 - 1, a2, b2))) /
             (4.0 * h);
    if (a2 > 0)
      return ((rec(z1, z2 + h, a1, b1, a2 - 1, b2) - rec(z1, z2 - h, a1, b1, a2 - 1, b2)) -
              i * (rec(z1, z2 + i * h, a1, b1, a2 - 1, b2) - rec(z1, z2 - i * h, a1, b1, a2 - 1, b2))) /
             (4.0 * h);
    return ((rec(z1, z2 + h, a1, b1, a2, b2 - 1) - rec(z1, z2 - h, a1, b1, a2, b2 - 1)) +
            i * (rec(z1, z2 + i * h, a1, b1, a2, b2 - 1) - rec(z1, z2 - i * h, a1, b1, a2, b2 - 1))) /
           (4.0 * h);
  }

  // optional closed-form adapted frame (the round sphere has one)
  struct ClosedFrame {
    Poly theta1[2];   // theta1 = P1 dz1 + P2 dz2
    Poly zeta[2];     // type (1,0) field with theta(i zeta) = 1 on M
    Poly z1field[2];  // Z1 with theta1(Z1) = 1 on M
  };
  std::optional<ClosedFrame> closed_frame;

  // damped Newton projection onto gamma = 0 along the ambient gradient
  bool project(cplx& z1, cplx& z2, int max_iter = 50, double tol = 1e-12) const {
    for (int it = 0; it < max_iter; ++it) {
      double g = gamma(z1, z2);
      if (std::abs(g) < tol) return true;
      cplx g1 = dgamma(z1, z2, 1, 0, 0, 0);
      cplx g2 = dgamma(z1, z2, 0, 0, 1, 0);
      double n2 = 2.0 * (std::norm(g1) + std::norm(g2));  // |real gradient|^2
      if (n2 < 1e-30) return false;
      double step = g / n2;
      double damp = 1.0;
      for (int tries = 0; tries < 20; ++tries) {
        cplx w1 = z1 - damp * step * std::conj(g1);
        cplx w2 = z2 - damp * step * std::conj(g2);
        if (std::abs(gamma(w1, w2)) < std::abs(g)) {
          z1 = w1;
          z2 = w2;
          break;
        }
        damp *= 0.5;
      }
    }
    return std::abs(gamma(z1, z2)) < tol;
  }

private:
  Poly gamma_;
  std::function<double(cplx, cplx)> fn_;
  bool exact_ = true;
  double step_ = 1e-4;
};

inline Poly sphere_gamma() {
  return poly_z1() * poly_z1b() + poly_z2() * poly_z2b() - Poly(1.0);
}

inline Hypersurface make_sphere() {
  Hypersurface g = Hypersurface::from_poly(sphere_gamma());
  Hypersurface::ClosedFrame f;
  f.theta1[0] = poly_z2();
  f.theta1[1] = Poly(0.0) - poly_z1();
  f.zeta[0] = poly_z1();
  f.zeta[1] = poly_z2();
  f.z1field[0] = poly_z2b();
  f.z1field[1] = Poly(0.0) - poly_z1b();
  g.closed_frame = f;
  return g;
}

// same geometry through the black-box fallback (for tolerance-path tests)
inline Hypersurface make_sphere_fd() {
  return Hypersurface::from_function(
      [](cplx z1, cplx z2) { return std::norm(z1) + std::norm(z2) - 1.0; });
}

inline Hypersurface make_ellipsoid() {
  return Hypersurface::from_poly(poly_z1() * poly_z1b() +
                                 2.0 * (poly_z2() * poly_z2b()) - Poly(1.0));
}

// gamma = |z|^2 - 1 + eps Re(z1^{mode+1} z2bar)
inline Hypersurface make_perturbed_sphere(double eps, int mode = 1) {
  Poly pert = poly_z1();
  for (int k = 1; k < mode + 1; ++k) pert = pert * poly_z1();
  pert = pert * poly_z2b();
  return Hypersurface::from_poly(sphere_gamma() + poly_re(pert) * cplx(eps));
}

// Low-discrepancy samples on M: Halton angles on the unit sphere, then a
// Newton projection for non-spherical geometries. Accepted points satisfy
// |gamma| <= 1e-10 with nonzero gradient.
inline std::vector<std::array<cplx, 2>> sample_surface(const Hypersurface& g,
                                                       int n, std::uint64_t skip = 0) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  constexpr double kHalfPi = 1.5707963267948966192313216916398;
  std::vector<std::array<cplx, 2>> out;
  auto pts = halton_points(3 * n + 16, 3, {0.02, 0, 0, 0},
                           {kHalfPi - 0.02, kTwoPi, kTwoPi, 0}, skip);
  for (auto& a : pts) {
    if (int(out.size()) == n) break;
    double chi = a[0], p1 = a[1], p2 = a[2];
    cplx z1 = std::polar(std::cos(chi), p1);
    cplx z2 = std::polar(std::sin(chi), p2);
    if (!g.project(z1, z2)) continue;
    if (std::abs(g.gamma(z1, z2)) > 1e-10) continue;
    cplx g1 = g.dgamma(z1, z2, 1, 0, 0, 0);
    cplx g2 = g.dgamma(z1, z2, 0, 0, 1, 0);
    if (std::sqrt(std::norm(g1) + std::norm(g2)) < 1e-8) continue;
    out.push_back({z1, z2});
  }
  if (int(out.size()) < n) throw Error("sampler could not place enough surface points");
  return out;
}

} // namespace crlab
