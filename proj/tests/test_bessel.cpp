#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "wickconv/bessel.hpp"
#include "wickconv/quadrature.hpp"

using namespace wickconv;
using cplx = std::complex<double>;

namespace {

// Independent oracle: K0(z) = 2 e^{-z} int_0^inf e^{-z v^2} / sqrt(v^2+2) dv,
// obtained from the cosh representation by u = cosh(theta) = 1 + v^2.
cplx k0_oracle(cplx z) {
  const double re = z.real();
  REQUIRE(re > 0.0);
  const double vmax = std::sqrt(60.0 / re);
  auto f = [&](double v) -> cplx { return std::exp(-z * v * v) / std::sqrt(v * v + 2.0); };
  const cplx integral = quad::integrate(f, 0.0, vmax, 1e-12);
  return 2.0 * std::exp(-z) * integral;
}

}  // namespace

TEST_CASE("k0 matches std::cyl_bessel_k on the real axis") {
  for (double x : {0.05, 0.3, 1.0, 2.0, 4.0, 5.5, 7.0, 10.0, 15.0, 18.0, 30.0}) {
    const cplx v = bessel::k0(cplx(x, 0.0));
    const double ref = std::cyl_bessel_k(0.0, x);
    CHECK(std::abs(v.real() - ref) <= 1e-11 * ref);
    CHECK(std::abs(v.imag()) <= 1e-13 * ref);
  }
  for (double x : {0.5, 2.0, 6.0, 12.0, 20.0}) {
    const cplx v = bessel::k1(cplx(x, 0.0));
    const double ref = std::cyl_bessel_k(1.0, x);
    CHECK(std::abs(v.real() - ref) <= 1e-10 * ref);
  }
}

TEST_CASE("k0 matches the integral-representation oracle across regions and phases") {
  const std::vector<double> radii{0.1, 0.5, 1.0, 2.0, 4.9, 5.1, 6.5, 8.0, 12.0, 15.9, 16.1, 20.0, 40.0};
  const std::vector<double> phases{0.0, 0.3, -0.3, 0.7, -0.7, 1.1, -1.1, 1.40, -1.40};
  for (double r : radii) {
    for (double ph : phases) {
      const cplx z = std::polar(r, ph);
      if (z.real() < 0.05) continue;  // oracle quadrature needs some decay
      const cplx got = bessel::k0(z);
      const cplx want = k0_oracle(z);
      CHECK(std::abs(got - want) <= 3e-10 * std::abs(want));
    }
  }
}

TEST_CASE("k0 region boundaries are seamless up to the exact derivative") {
  // K0(b) - K0(a) must equal -K1(mid)(b - a) to second order; this crosses
  // each method boundary, validating the marched branch against the series
  // branch (at |z| = 5) and the asymptotic branch (at |z| = 16) for every
  // phase, including near the imaginary axis where the quadrature oracle
  // cannot reach.
  for (double ph : {0.0, 0.5, -0.5, 0.9, -1.2, 1.45, -1.45, 1.53, -1.53, 1.5701, -1.5701}) {
    for (double r0 : {5.0, 16.0}) {
      const cplx za = std::polar(r0 - 1e-3, ph);
      const cplx zb = std::polar(r0 + 1e-3, ph);
      const cplx mid = std::polar(r0, ph);
      const cplx got = bessel::k0(zb) - bessel::k0(za);
      const cplx want = -bessel::k1(mid) * (zb - za);
      CHECK(std::abs(got - want) <= 1e-5 * std::abs(want) + 1e-14);
    }
  }
}

TEST_CASE("k0 rejects the left half-plane and zero") {
  CHECK_THROWS(bessel::k0(cplx(-1.0, 0.5)));
  CHECK_THROWS(bessel::k0(cplx(0.0, 0.0)));
}
