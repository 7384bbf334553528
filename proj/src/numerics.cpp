#include "wickconv/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wickconv::num {

double log_sum_exp(std::span<const double> a) {
  double m = kNegInf;
  for (double v : a)
    if (v > m) m = v;
  if (m == kNegInf) return kNegInf;
  if (std::isinf(m)) return m;
  Kahan acc;
  for (double v : a)
    if (v != kNegInf) acc.add(std::exp(v - m));
  return m + std::log(acc.sum);
}

MinResult golden_min(const std::function<double(double)>& f, double a, double b, double xtol,
                     int max_iter) {
  constexpr double invphi = 0.6180339887498949;
  if (b < a) std::swap(a, b);
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  int evals = 2;
  for (int it = 0; it < max_iter && (b - a) > xtol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
    ++evals;
  }
  return f1 <= f2 ? MinResult{x1, f1, evals} : MinResult{x2, f2, evals};
}

GridMinResult log_grid_min(const std::function<double(double)>& f, double lo, double hi,
                           int grid_points, double xtol_log) {
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("log_grid_min: need 0 < lo < hi");
  const double llo = std::log(lo), lhi = std::log(hi);
  std::vector<double> lx(grid_points), fv(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    lx[i] = llo + (lhi - llo) * i / (grid_points - 1);
    fv[i] = f(std::exp(lx[i]));
  }
  int best = 0;
  for (int i = 1; i < grid_points; ++i)
    if (fv[i] < fv[best]) best = i;
  GridMinResult out;
  if (best == 0 || best == grid_points - 1) {
    out.x = std::exp(lx[best]);
    out.f = fv[best];
    out.edge = true;
    return out;
  }
  auto g = [&](double u) { return f(std::exp(u)); };
  const MinResult m = golden_min(g, lx[best - 1], lx[best + 1], xtol_log);
  out.x = std::exp(m.x);
  out.f = m.f;
  // A refined value must never exceed the bracketing grid samples.
  if (fv[best] < out.f) {
    out.x = std::exp(lx[best]);
    out.f = fv[best];
  }
  return out;
}

std::int64_t concave_argmax(const std::function<double(std::int64_t)>& g, std::int64_t lo,
                            std::int64_t hi) {
  while (hi - lo > 2) {
    const std::int64_t m1 = lo + (hi - lo) / 3;
    const std::int64_t m2 = hi - (hi - lo) / 3;
    if (g(m1) < g(m2))
      lo = m1 + 1;
    else
      hi = m2 - 1;
  }
  std::int64_t arg = lo;
  double best = g(lo);
  for (std::int64_t k = lo + 1; k <= hi; ++k) {
    const double v = g(k);
    if (v > best) {
      best = v;
      arg = k;
    }
  }
  return arg;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw std::invalid_argument("fit_line: need matching n >= 2");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return out;
}

void sym_eig(int n, const std::vector<double>& a, std::vector<double>& evals,
             std::vector<double>& evecs) {
  if (n < 1 || n > 16 || static_cast<int>(a.size()) != n * n)
    throw std::invalid_argument("sym_eig: bad dimensions");
  std::vector<double> m = a;
  evecs.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) evecs[static_cast<std::size_t>(i) * n + i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += m[p * n + q] * m[p * n + q];
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = m[p * n + q];
        if (std::abs(apq) < 1e-300) continue;
        const double theta = 0.5 * (m[q * n + q] - m[p * n + p]) / apq;
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double mip = m[i * n + p], miq = m[i * n + q];
          m[i * n + p] = c * mip - s * miq;
          m[i * n + q] = s * mip + c * miq;
        }
        for (int i = 0; i < n; ++i) {
          const double mpi = m[p * n + i], mqi = m[q * n + i];
          m[p * n + i] = c * mpi - s * mqi;
          m[q * n + i] = s * mpi + c * mqi;
        }
        for (int i = 0; i < n; ++i) {
          const double vip = evecs[static_cast<std::size_t>(i) * n + p];
          const double viq = evecs[static_cast<std::size_t>(i) * n + q];
          evecs[static_cast<std::size_t>(i) * n + p] = c * vip - s * viq;
          evecs[static_cast<std::size_t>(i) * n + q] = s * vip + c * viq;
        }
      }
    }
  }
  evals.resize(n);
  for (int i = 0; i < n; ++i) evals[i] = m[i * n + i];
}

std::vector<double> solve_small(int n, std::vector<double> a, std::vector<double> rhs) {
  if (static_cast<int>(a.size()) != n * n || static_cast<int>(rhs.size()) != n)
    throw std::invalid_argument("solve_small: bad dimensions");
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (std::abs(a[piv * n + col]) < 1e-300) throw std::runtime_error("solve_small: singular");
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
      std::swap(rhs[piv], rhs[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (int r = n - 1; r >= 0; --r) {
    double s = rhs[r];
    for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * x[c];
    x[r] = s / a[r * n + r];
  }
  return x;
}

double log_factorial(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("log_factorial: negative argument");
  static const auto small = [] {
    std::vector<double> t(171);
    t[0] = 0.0;
    long double acc = 0.0L;
    for (int k = 1; k < 171; ++k) {
      acc += std::log(static_cast<long double>(k));
      t[k] = static_cast<double>(acc);
    }
    return t;
  }();
  if (n < static_cast<std::int64_t>(small.size())) return small[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

}  // namespace wickconv::num
