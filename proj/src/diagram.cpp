#include "wickconv/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "wickconv/numerics.hpp"
#include "wickconv/quadrature.hpp"

namespace wickconv::diagram {

namespace {

using fields::CVec2;
using fields::GaussianSpec;
using fields::Which;

cplx ipow(cplx base, int e) {
  cplx r{1.0, 0.0};
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

struct PairSpec {
  int j, m;         // vertex pair, j < m
  double sign;      // argument orientation: arg = sign * (u_j - u_m)
  double im_shift;  // time-component imaginary offset of the argument
  Which which;
};

// Geometry shared by both quadrature paths: staggered contour offsets,
// effective complex Gaussian centers, reduced quadratic form.
struct Setup {
  int V = 2;                       // vertex count (2n)
  int n = 1;
  std::vector<double> sigma;       // contour offsets
  std::vector<cplx> gamma_t, gamma_x;  // effective complex centers
  std::vector<double> nu2;
  double S = 0.0;                  // sum nu_j^2
  double prefactor = 1.0;          // prod (nu^2/pi) * (pi/S)
  // reduced form over u_0..u_{V-2}: Q(u) = u^T A u - 2 b^T u + c per component
  std::vector<double> A;           // (V-1) x (V-1), row-major
  std::vector<cplx> b_t, b_x;
  cplx c_t{0.0, 0.0}, c_x{0.0, 0.0};
};

Setup make_setup(std::span<const GaussianSpec> bra, std::span<const GaussianSpec> ket,
                 const Options& opts) {
  if (bra.empty() || bra.size() != ket.size())
    throw std::invalid_argument("contracted_integral: need matching nonempty bra/ket");
  Setup s;
  s.n = static_cast<int>(bra.size());
  s.V = 2 * s.n;
  const double delta = opts.stagger;
  if (!(delta > 0.0)) throw std::invalid_argument("contracted_integral: stagger must be > 0");

  s.sigma.resize(s.V);
  s.gamma_t.resize(s.V);
  s.gamma_x.resize(s.V);
  s.nu2.resize(s.V);
  for (int j = 0; j < s.V; ++j) {
    const bool is_bra = j < s.n;
    const GaussianSpec& gsp = is_bra ? bra[j] : ket[j - s.n];
    s.sigma[j] = is_bra ? -delta * (j + 1) : delta * (j - s.n + 1);
    // bra side carries the conjugated Gaussian
    const cplx c0 = is_bra ? cplx(gsp.center_re.t, -gsp.center_im.t)
                           : cplx(gsp.center_re.t, gsp.center_im.t);
    const cplx c1 = is_bra ? cplx(gsp.center_re.x, -gsp.center_im.x)
                           : cplx(gsp.center_re.x, gsp.center_im.x);
    s.gamma_t[j] = c0 - cplx(0.0, s.sigma[j]);
    s.gamma_x[j] = c1;
    s.nu2[j] = gsp.nu * gsp.nu;
  }
  s.S = 0.0;
  double logn = 0.0;
  for (int j = 0; j < s.V; ++j) {
    s.S += s.nu2[j];
    logn += std::log(s.nu2[j] / M_PI);
  }
  s.prefactor = std::exp(logn) * (M_PI / s.S);

  const int r = s.V - 1;
  s.A.assign(static_cast<std::size_t>(r) * r, 0.0);
  for (int j = 0; j < r; ++j)
    for (int k = 0; k < r; ++k)
      s.A[static_cast<std::size_t>(j) * r + k] =
          (j == k ? s.nu2[j] : 0.0) - s.nu2[j] * s.nu2[k] / s.S;

  cplx g_t{0.0, 0.0}, g_x{0.0, 0.0};
  for (int j = 0; j < s.V; ++j) {
    g_t += s.nu2[j] * s.gamma_t[j];
    g_x += s.nu2[j] * s.gamma_x[j];
  }
  s.b_t.resize(r);
  s.b_x.resize(r);
  for (int j = 0; j < r; ++j) {
    s.b_t[j] = s.nu2[j] * (s.gamma_t[j] - g_t / s.S);
    s.b_x[j] = s.nu2[j] * (s.gamma_x[j] - g_x / s.S);
  }
  s.c_t = -g_t * g_t / s.S;
  s.c_x = -g_x * g_x / s.S;
  for (int j = 0; j < s.V; ++j) {
    s.c_t += s.nu2[j] * s.gamma_t[j] * s.gamma_t[j];
    s.c_x += s.nu2[j] * s.gamma_x[j] * s.gamma_x[j];
  }
  return s;
}

std::vector<PairSpec> make_pairs(const Setup& s, const Options& opts) {
  std::vector<PairSpec> pairs;
  for (int j = 0; j < s.V; ++j) {
    for (int m = j + 1; m < s.V; ++m) {
      PairSpec p;
      p.j = j;
      p.m = m;
      if (m < s.n) {  // bra block: w(z_m - z_j)
        p.sign = -1.0;
        p.im_shift = s.sigma[m] - s.sigma[j];
        p.which = Which::Indefinite;
      } else if (j >= s.n) {  // ket block: w(z_j - z_m)
        p.sign = 1.0;
        p.im_shift = s.sigma[j] - s.sigma[m];
        p.which = Which::Indefinite;
      } else {  // cross block
        p.sign = 1.0;
        p.im_shift = s.sigma[j] - s.sigma[m];
        p.which = opts.cross_kernel;
      }
      pairs.push_back(p);
    }
  }
  return pairs;
}

// u_j with the last vertex anchored at the origin
inline double u_of(const std::vector<double>& u, int j, int V) {
  return j == V - 1 ? 0.0 : u[static_cast<std::size_t>(j)];
}

cplx kernel_at(const fields::TwoPointModel& model, const PairSpec& p,
               const std::vector<double>& ut, const std::vector<double>& ux, int V) {
  const double dt = u_of(ut, p.j, V) - u_of(ut, p.m, V);
  const double dx = u_of(ux, p.j, V) - u_of(ux, p.m, V);
  const CVec2 arg{cplx(p.sign * dt, p.im_shift), cplx(p.sign * dx, 0.0)};
  return fields::eval_kernel(model, arg, p.which);
}

cplx two_vertex_integral(const fields::TwoPointModel& model, const Setup& s,
                         const std::vector<PairSpec>& pairs, int power, const Options& opts) {
  const double lambda = s.A[0];
  const cplx mu_t = s.b_t[0] / lambda;
  const cplx mu_x = s.b_x[0] / lambda;
  const double half_t = 8.0 / std::sqrt(lambda) + std::abs(mu_t.imag()) + 2.0;
  const double half_x = 8.0 / std::sqrt(lambda) + std::abs(mu_x.imag()) + 2.0;
  const PairSpec& p = pairs[0];

  auto f = [&](double u0, double u1) -> cplx {
    const cplx q = lambda * (cplx(u0) * u0 + cplx(u1) * u1) - 2.0 * (s.b_t[0] * u0 + s.b_x[0] * u1) +
                   s.c_t + s.c_x;
    cplx val = std::exp(-q);
    if (power > 0) {
      const CVec2 arg{cplx(p.sign * u0, p.im_shift), cplx(p.sign * u1, 0.0)};
      val *= ipow(fields::eval_kernel(model, arg, p.which), power);
    }
    return val;
  };
  quad::QuadError qe;
  const cplx integral = quad::integrate2d(f, mu_t.real() - half_t, mu_t.real() + half_t,
                                          mu_x.real() - half_x, mu_x.real() + half_x,
                                          opts.rel_tol, &qe);
  const cplx value = s.prefactor * integral;
  // failure needs both relative and absolute badness: heavy phase
  // cancellation makes tiny results with perfectly healthy absolute error
  if (qe.estimate > 1e-2 * std::abs(integral) && qe.estimate > 1e-10 * qe.l1)
    throw std::runtime_error("contracted_integral: 2-vertex quadrature did not converge");
  return value;
}

// Tensor Gauss-Hermite sweep evaluating every requested multi-index at once.
std::vector<cplx> four_vertex_batch(const fields::TwoPointModel& model, const Setup& s,
                                    const std::vector<PairSpec>& pairs,
                                    std::span<const wick::PairingMultiIndex> ks,
                                    const Options& opts) {
  const int r = s.V - 1;  // 3
  std::vector<double> evals, evecs;
  num::sym_eig(r, s.A, evals, evecs);
  for (double ev : evals)
    if (!(ev > 0.0)) throw std::runtime_error("contracted_integral: reduced form not SPD");

  // T = E diag(1/sqrt(lambda)); real stationary points m = Re(A^{-1} b)
  std::vector<double> T(static_cast<std::size_t>(r) * r);
  double det_t = 1.0;
  for (int i = 0; i < r; ++i) det_t /= std::sqrt(evals[i]);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < r; ++k)
      T[static_cast<std::size_t>(i) * r + k] =
          evecs[static_cast<std::size_t>(i) * r + k] / std::sqrt(evals[k]);

  auto solve_re_im = [&](const std::vector<cplx>& b) {
    std::vector<double> re(r), im(r);
    for (int i = 0; i < r; ++i) {
      re[i] = b[static_cast<std::size_t>(i)].real();
      im[i] = b[static_cast<std::size_t>(i)].imag();
    }
    const auto xr = num::solve_small(r, s.A, re);
    const auto xi = num::solve_small(r, s.A, im);
    std::vector<cplx> mu(r);
    for (int i = 0; i < r; ++i) mu[i] = cplx(xr[i], xi[i]);
    return mu;
  };
  const auto mu_t = solve_re_im(s.b_t);
  const auto mu_x = solve_re_im(s.b_x);

  // per-pair maximum exponent over the batch
  const std::size_t npairs = pairs.size();
  std::vector<int> max_pow(npairs, 0);
  for (const auto& K : ks)
    for (std::size_t p = 0; p < npairs; ++p)
      max_pow[p] = std::max(max_pow[p], K.k[p]);

  const auto& rule = quad::gauss_hermite(opts.hermite_nodes);
  const int H = opts.hermite_nodes;
  std::size_t n_nodes = 1;
  for (int dimi = 0; dimi < 2 * r; ++dimi) n_nodes *= static_cast<std::size_t>(H);

  const std::size_t n_ks = ks.size();
  const std::size_t n_chunks = (n_nodes + par::kChunk - 1) / par::kChunk;
  std::vector<std::vector<cplx>> partial(n_chunks);

  auto body = [&](std::size_t chunk) {
    std::vector<cplx> local(n_ks, cplx{0.0, 0.0});
    std::vector<double> ut(r), ux(r);
    std::vector<std::vector<cplx>> pw(npairs);
    for (std::size_t p = 0; p < npairs; ++p) pw[p].resize(static_cast<std::size_t>(max_pow[p]) + 1);
    const std::size_t lo = chunk * par::kChunk;
    const std::size_t hi = std::min(lo + par::kChunk, n_nodes);
    for (std::size_t idx = lo; idx < hi; ++idx) {
      // decode the tensor index: first r dims time, last r dims space
      std::size_t rem = idx;
      double wgt = 1.0, y2 = 0.0;
      double yt[8], yx[8];
      for (int dimi = 0; dimi < r; ++dimi) {
        const int q = static_cast<int>(rem % H);
        rem /= H;
        yt[dimi] = rule.x[q];
        wgt *= rule.w[q];
        y2 += rule.x[q] * rule.x[q];
      }
      for (int dimi = 0; dimi < r; ++dimi) {
        const int q = static_cast<int>(rem % H);
        rem /= H;
        yx[dimi] = rule.x[q];
        wgt *= rule.w[q];
        y2 += rule.x[q] * rule.x[q];
      }
      for (int i = 0; i < r; ++i) {
        double at = mu_t[i].real(), ax = mu_x[i].real();
        for (int k = 0; k < r; ++k) {
          at += T[static_cast<std::size_t>(i) * r + k] * yt[k];
          ax += T[static_cast<std::size_t>(i) * r + k] * yx[k];
        }
        ut[i] = at;
        ux[i] = ax;
      }
      cplx q_t = s.c_t, q_x = s.c_x;
      for (int i = 0; i < r; ++i) {
        q_t -= 2.0 * s.b_t[i] * ut[i];
        q_x -= 2.0 * s.b_x[i] * ux[i];
        for (int k = 0; k < r; ++k) {
          q_t += s.A[static_cast<std::size_t>(i) * r + k] * ut[i] * ut[k];
          q_x += s.A[static_cast<std::size_t>(i) * r + k] * ux[i] * ux[k];
        }
      }
      const cplx common = wgt * std::exp(-(q_t + q_x) + y2);
      for (std::size_t p = 0; p < npairs; ++p) {
        pw[p][0] = cplx{1.0, 0.0};
        if (max_pow[p] > 0) {
          const cplx kv = kernel_at(model, pairs[p], ut, ux, s.V);
          for (int e = 1; e <= max_pow[p]; ++e) pw[p][static_cast<std::size_t>(e)] = pw[p][e - 1] * kv;
        }
      }
      for (std::size_t ki = 0; ki < n_ks; ++ki) {
        cplx term = common;
        for (std::size_t p = 0; p < npairs; ++p) {
          const int e = ks[ki].k[p];
          if (e > 0) term *= pw[p][static_cast<std::size_t>(e)];
        }
        local[ki] += term;
      }
    }
    partial[chunk] = std::move(local);
  };
  par::detail::run_chunks(opts.exec, n_nodes, body);

  std::vector<cplx> out(n_ks, cplx{0.0, 0.0});
  for (std::size_t c = 0; c < n_chunks; ++c)
    for (std::size_t ki = 0; ki < n_ks; ++ki) out[ki] += partial[c][ki];
  const double scale = s.prefactor * det_t * det_t;
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace

cplx contracted_integral(const fields::TwoPointModel& model, std::span<const GaussianSpec> bra,
                         std::span<const GaussianSpec> ket, const wick::PairingMultiIndex& K,
                         const Options& opts) {
  const Setup s = make_setup(bra, ket, opts);
  if (K.two_n != s.V) throw std::invalid_argument("contracted_integral: K vertex count mismatch");
  const auto pairs = make_pairs(s, opts);
  if (s.V == 2) return two_vertex_integral(model, s, pairs, K.k[0], opts);
  if (s.V == 4) {
    const wick::PairingMultiIndex ks[] = {K};
    return four_vertex_batch(model, s, pairs, ks, opts)[0];
  }
  throw std::invalid_argument("contracted_integral: only n = 1 and n = 2 are supported");
}

KernelIntegralCache::KernelIntegralCache(const fields::TwoPointModel& model,
                                         std::vector<GaussianSpec> bra,
                                         std::vector<GaussianSpec> ket, Options opts)
    : model_(model), bra_(std::move(bra)), ket_(std::move(ket)), opts_(opts) {}

void KernelIntegralCache::precompute(std::span<const wick::PairingMultiIndex> ks) {
  std::vector<wick::PairingMultiIndex> missing;
  for (const auto& K : ks)
    if (!cache_.count(K.k)) missing.push_back(K);
  if (missing.empty()) return;
  const Setup s = make_setup(bra_, ket_, opts_);
  const auto pairs = make_pairs(s, opts_);
  if (s.V == 2) {
    for (const auto& K : missing)
      cache_.emplace(K.k, two_vertex_integral(model_, s, pairs, K.k[0], opts_));
    return;
  }
  if (s.V != 4)
    throw std::invalid_argument("KernelIntegralCache: only n = 1 and n = 2 are supported");
  const auto values = four_vertex_batch(model_, s, pairs, missing, opts_);
  for (std::size_t i = 0; i < missing.size(); ++i) cache_.emplace(missing[i].k, values[i]);
}

cplx KernelIntegralCache::value(const wick::PairingMultiIndex& K) {
  const auto it = cache_.find(K.k);
  if (it != cache_.end()) return it->second;
  const wick::PairingMultiIndex ks[] = {K};
  precompute(ks);
  return cache_.at(K.k);
}

namespace {

// all degree profiles (p_1..p_n) with sum <= cap, in lexicographic order
void profiles(int n, int cap, std::vector<int>& cur,
              const std::function<void(const std::vector<int>&)>& sink) {
  if (static_cast<int>(cur.size()) == n) {
    sink(cur);
    return;
  }
  for (int d = 0; d <= cap; ++d) {
    cur.push_back(d);
    profiles(n, cap - d, cur, sink);
    cur.pop_back();
  }
}

}  // namespace

std::map<wick::PairingMultiIndex, wick::BigInt> norm_patterns_by_recursion(int n, int cap) {
  using wick::BigInt;
  using wick::PairingMultiIndex;
  std::map<PairingMultiIndex, BigInt> out;

  std::vector<std::vector<int>> prof_list;
  std::vector<int> cur;
  profiles(n, cap, cur, [&](const std::vector<int>& p) { prof_list.push_back(p); });

  std::vector<wick::NormalOrderExpansion> reductions(prof_list.size());
  for (std::size_t i = 0; i < prof_list.size(); ++i)
    reductions[i] = wick::normal_order_reduce(prof_list[i]);

  const int two_n = 2 * n;
  for (std::size_t bi = 0; bi < prof_list.size(); ++bi) {
    for (std::size_t ki = 0; ki < prof_list.size(); ++ki) {
      for (const auto& [ta, ca] : reductions[bi]) {
        for (const auto& [tb, cb] : reductions[ki]) {
          const auto cross = wick::bipartite_pattern_counts(ta.residual, tb.residual);
          for (const auto& [x, cnt] : cross) {
            PairingMultiIndex K(two_n);
            for (int j = 0; j < n; ++j)
              for (int m = j + 1; m < n; ++m)
                K.at(j, m) = ta.contractions[PairingMultiIndex::pair_index(j, m, n)];
            for (int j = 0; j < n; ++j)
              for (int m = j + 1; m < n; ++m)
                K.at(n + j, n + m) = tb.contractions[PairingMultiIndex::pair_index(j, m, n)];
            for (int j = 0; j < n; ++j)
              for (int m = 0; m < n; ++m)
                K.at(j, n + m) = x[static_cast<std::size_t>(j) * n + m];
            out[K] += ca * cb * cnt;
          }
        }
      }
    }
  }
  return out;
}

std::map<wick::PairingMultiIndex, wick::BigInt> norm_patterns_by_multiindex(int n, int cap) {
  using wick::BigInt;
  using wick::PairingMultiIndex;
  std::map<PairingMultiIndex, BigInt> out;
  const int two_n = 2 * n;
  PairingMultiIndex K(two_n);
  std::vector<int> deg(static_cast<std::size_t>(two_n), 0);

  std::function<void(int, int)> rec = [&](int j, int m) {
    if (j == two_n - 1) {
      out.emplace(K, wick::pairing_weight_exact(K));
      return;
    }
    if (m == two_n) {
      rec(j + 1, j + 2);
      return;
    }
    int side_a = 0, side_b = 0;
    for (int v = 0; v < n; ++v) side_a += deg[static_cast<std::size_t>(v)];
    for (int v = n; v < two_n; ++v) side_b += deg[static_cast<std::size_t>(v)];
    const int head_a = j < n ? cap - side_a : cap;  // slack on each side
    const int head_b = m >= n ? cap - side_b : cap;
    int cmax = std::min(head_a, head_b);
    if (j < n && m < n) cmax = std::min(cmax, (cap - side_a) / 2);
    if (j >= n && m >= n) cmax = std::min(cmax, (cap - side_b) / 2);
    for (int c = 0; c <= cmax; ++c) {
      K.at(j, m) = c;
      deg[static_cast<std::size_t>(j)] += c;
      deg[static_cast<std::size_t>(m)] += c;
      rec(j, m + 1);
      deg[static_cast<std::size_t>(j)] -= c;
      deg[static_cast<std::size_t>(m)] -= c;
    }
    K.at(j, m) = 0;
  };
  rec(0, 1);
  return out;
}

cplx norm_sq_from_patterns(const std::map<wick::PairingMultiIndex, wick::BigInt>& patterns,
                           const wick::CoefficientSequence& d, KernelIntegralCache& cache) {
  std::vector<wick::PairingMultiIndex> ks;
  ks.reserve(patterns.size());
  for (const auto& [K, c] : patterns) ks.push_back(K);
  cache.precompute(ks);

  cplx total{0.0, 0.0};
  for (const auto& [K, coeff] : patterns) {
    double logw = 0.0;
    bool zero = false;
    for (std::int64_t deg : K.degrees()) {
      const double la = d.log_abs(deg);
      if (la == num::kNegInf) {
        zero = true;
        break;
      }
      logw += la;
    }
    if (zero) continue;
    total += static_cast<double>(coeff) * std::exp(logw) * cache.value(K);
  }
  return total;
}

}  // namespace wickconv::diagram
