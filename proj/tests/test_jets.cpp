#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crlab/fields/jet.hpp"

using namespace crlab;

TEST_CASE("jet variables and products") {
  // f(x,y) = (2 + x)^2 * y around (x,y) = (0.5, -1)
  Jet x = Jet::variable(2, 5, 0, 0.5);
  Jet y = Jet::variable(2, 5, 1, -1.0);
  Jet two(2, 5, 2.0);
  Jet f = (two + x) * (two + x) * y;

  CHECK(f.value().real() == doctest::Approx(2.5 * 2.5 * -1.0).epsilon(1e-14));
  // df/dx = 2(2+x)y
  CHECK(f.deriv(0).value().real() == doctest::Approx(2 * 2.5 * -1.0).epsilon(1e-14));
  // d2f/dx dy = 2(2+x)
  CHECK(f.deriv(0).deriv(1).value().real() == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(f.deriv(1).deriv(1).value().real() == doctest::Approx(0.0));
}

TEST_CASE("jet transcendentals match analytic derivatives") {
  Jet x = Jet::variable(1, 8, 0, 0.3);
  const cplx i(0, 1);

  Jet e = (x * i).exp();   // e^{ix}
  CHECK(std::abs(e.value() - std::polar(1.0, 0.3)) < 1e-14);
  CHECK(std::abs(e.deriv(0).value() - i * std::polar(1.0, 0.3)) < 1e-13);
  CHECK(std::abs(e.deriv(0).deriv(0).deriv(0).value() + i * std::polar(1.0, 0.3)) < 1e-12);

  Jet s = x.sin();
  CHECK(std::abs(s.deriv(0).value() - std::cos(0.3)) < 1e-13);
  CHECK(std::abs(s.deriv(0).deriv(0).value() + std::sin(0.3)) < 1e-12);

  Jet r = (Jet(1, 8, 1.0) + x * x).recip();  // 1/(1+x^2)
  double v = 1.0 / (1.0 + 0.09);
  CHECK(std::abs(r.value() - v) < 1e-14);
  CHECK(std::abs(r.deriv(0).value() + 2 * 0.3 * v * v) < 1e-12);

  Jet q = (Jet(1, 8, 1.0) + x).sqrt();
  CHECK(std::abs(q.value() - std::sqrt(1.3)) < 1e-14);
  CHECK(std::abs(q.deriv(0).value() - 0.5 / std::sqrt(1.3)) < 1e-13);
}

TEST_CASE("jet conjugation and shift evaluation") {
  Jet x = Jet::variable(2, 6, 0, 1.0);
  Jet y = Jet::variable(2, 6, 1, 2.0);
  const cplx i(0, 1);
  Jet f = (x + y * i).exp();

  Jet fc = f.conj();
  CHECK(std::abs(fc.value() - std::conj(f.value())) < 1e-14);
  CHECK(std::abs(fc.deriv(1).value() - std::conj(f.deriv(1).value())) < 1e-13);

  // Taylor evaluation near the expansion point
  cplx approx = f.eval_shift({0.05, -0.03, 0, 0});
  cplx exact = std::exp(cplx(1.05, 1.97));
  CHECK(std::abs(approx - exact) < 1e-9);
}
