#include "wickconv/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace wickconv::quad {

namespace {
using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
}

cplx integrate(const std::function<cplx(double)>& f, double a, double b, double rel_tol,
               QuadError* err) {
  double e = 0.0, l1 = 0.0;
  const cplx v = GK::integrate(f, a, b, 15, rel_tol, &e, &l1);
  if (err) {
    err->estimate = e;
    err->l1 = l1;
    err->converged = !(e > rel_tol * (std::abs(v) + 1e-300) * 10.0 && e > 1e-14 * l1);
  }
  return v;
}

double integrate_real(const std::function<double(double)>& f, double a, double b, double rel_tol,
                      QuadError* err) {
  double e = 0.0, l1 = 0.0;
  const double v = GK::integrate(f, a, b, 15, rel_tol, &e, &l1);
  if (err) {
    err->estimate = e;
    err->l1 = l1;
    err->converged = !(e > rel_tol * (std::abs(v) + 1e-300) * 10.0 && e > 1e-14 * l1);
  }
  return v;
}

cplx integrate_line(const std::function<cplx(double)>& f, double half_width, double rel_tol,
                    QuadError* err) {
  double w = half_width;
  QuadError e0;
  cplx total = integrate(f, -w, w, rel_tol, &e0);
  double err_acc = e0.estimate;
  double l1_acc = e0.l1;
  for (int round = 0; round < 12; ++round) {
    QuadError el, er;
    const cplx left = integrate(f, -2.0 * w, -w, rel_tol, &el);
    const cplx right = integrate(f, w, 2.0 * w, rel_tol, &er);
    total += left + right;
    err_acc += el.estimate + er.estimate;
    l1_acc += el.l1 + er.l1;
    w *= 2.0;
    if (std::abs(left) + std::abs(right) < rel_tol * std::abs(total) * 0.1 + 1e-300) break;
  }
  if (err) {
    err->estimate = err_acc;
    err->l1 = l1_acc;
    err->converged = err_acc <= rel_tol * (std::abs(total) + 1e-300) * 100.0 || err_acc < 1e-300;
  }
  return total;
}

cplx integrate2d(const std::function<cplx(double, double)>& f, double ax, double bx, double ay,
                 double by, double rel_tol, QuadError* err) {
  double inner_err_max = 0.0;
  double inner_l1_max = 0.0;
  auto inner = [&](double x) {
    QuadError ei;
    const cplx v = integrate([&](double y) { return f(x, y); }, ay, by, rel_tol * 0.1, &ei);
    if (ei.estimate > inner_err_max) inner_err_max = ei.estimate;
    if (ei.l1 > inner_l1_max) inner_l1_max = ei.l1;
    return v;
  };
  QuadError eo;
  const cplx v = integrate(inner, ax, bx, rel_tol, &eo);
  if (err) {
    err->estimate = eo.estimate + inner_err_max * (bx - ax);
    err->l1 = inner_l1_max * (bx - ax);
    err->converged = err->estimate <= rel_tol * (std::abs(v) + 1e-300) * 100.0;
  }
  return v;
}

const HermiteRule& gauss_hermite(int n) {
  static std::map<int, HermiteRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1 || n > 256) throw std::invalid_argument("gauss_hermite: order out of range");

  // Nodes are roots of H_n; Newton iteration from the Tricomi initial guess,
  // sweeping from the largest root down.
  HermiteRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  auto hermite = [n](double x, double& h, double& hp) {
    // physicists' H_k via recurrence, scaled to avoid overflow
    double p0 = std::pow(M_PI, -0.25);  // normalized ~H_0
    double p1 = std::sqrt(2.0) * x * p0;
    for (int k = 1; k < n; ++k) {
      const double p2 = std::sqrt(2.0 / (k + 1.0)) * x * p1 - std::sqrt(k / (k + 1.0)) * p0;
      p0 = p1;
      p1 = p2;
    }
    h = p1;
    hp = std::sqrt(2.0 * n) * p0;  // derivative of normalized H_n
  };
  const int m = (n + 1) / 2;
  double x0 = std::sqrt(2.0 * n + 1.0);
  for (int i = 0; i < m; ++i) {
    // initial guesses per Numerical Recipes
    if (i == 0)
      x0 = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    else if (i == 1)
      x0 -= 1.14 * std::pow(static_cast<double>(n), 0.426) / x0;
    else if (i == 2)
      x0 = 1.86 * x0 - 0.86 * rule.x[0];
    else if (i == 3)
      x0 = 1.91 * x0 - 0.91 * rule.x[1];
    else
      x0 = 2.0 * x0 - rule.x[i - 2];
    double h = 0.0, hp = 1.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      hermite(x0, h, hp);
      const double dx = h / hp;
      x0 -= dx;
      if (std::abs(dx) < 1e-15 * (1.0 + std::abs(x0))) break;
    }
    hermite(x0, h, hp);
    rule.x[i] = x0;
    rule.w[i] = 2.0 / (hp * hp);
  }
  for (int i = 0; i < m; ++i) {
    rule.x[n - 1 - i] = -rule.x[i];
    rule.w[n - 1 - i] = rule.w[i];
  }
  if (n % 2 == 1) rule.x[m - 1] = 0.0;
  // ascending order
  for (int i = 0; i < n / 2; ++i) {
    std::swap(rule.x[i], rule.x[n - 1 - i]);
    std::swap(rule.w[i], rule.w[n - 1 - i]);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

}  // namespace wickconv::quad
