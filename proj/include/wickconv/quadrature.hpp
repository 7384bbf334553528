#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace wickconv::quad {

using cplx = std::complex<double>;

struct QuadError {
  double estimate = 0.0;
  double l1 = 0.0;  // L1 norm of the integrand, the natural absolute scale
  bool converged = true;
};

// Adaptive Gauss-Kronrod on [a, b].
cplx integrate(const std::function<cplx(double)>& f, double a, double b, double rel_tol,
               QuadError* err = nullptr);
double integrate_real(const std::function<double(double)>& f, double a, double b, double rel_tol,
                      QuadError* err = nullptr);

// Whole-line integral of a function decaying at least like exp(-decay*|x|^2)
// or exp(-decay*|x|) beyond |x| > center_halfwidth: integrates on expanding
// symmetric boxes until the increment is negligible.
cplx integrate_line(const std::function<cplx(double)>& f, double half_width, double rel_tol,
                    QuadError* err = nullptr);

// Iterated adaptive 2-D integral over [ax,bx] x [ay,by].
cplx integrate2d(const std::function<cplx(double, double)>& f, double ax, double bx, double ay,
                 double by, double rel_tol, QuadError* err = nullptr);

// Gauss-Hermite rule: sum_i w[i] f(x[i]) ~ integral f(x) exp(-x^2) dx.
struct HermiteRule {
  std::vector<double> x;
  std::vector<double> w;
};
const HermiteRule& gauss_hermite(int n);

}  // namespace wickconv::quad
