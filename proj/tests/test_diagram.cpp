#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "wickconv/diagram.hpp"
#include "wickconv/quadrature.hpp"

using namespace wickconv;
using namespace wickconv::diagram;
using fields::GaussianSpec;
using fields::TwoPointModel;
using fields::Which;
using wick::PairingMultiIndex;

namespace {

// independent momentum-space oracle for the k = 2 diagonal value:
// int w_mu^2(x1 - x2) conj(f)(x1) g(x2) = c^2 sum_{s,t} mu_s mu_t
//   int dp dq / (4 w_s w_t) conj(fhat)(P) ghat(P),  P = P_s(p) + P_t(q)
cplx i2_oracle(const TwoPointModel& model, const GaussianSpec& f, const GaussianSpec& g) {
  cplx total{0.0, 0.0};
  for (const auto& sa : model.shells()) {
    for (const auto& sb : model.shells()) {
      if (sa.mu_weight == 0.0 || sb.mu_weight == 0.0) continue;
      auto outer = [&](double p) -> cplx {
        const double wp = std::sqrt(p * p + sa.mass * sa.mass);
        auto inner = [&](double q) -> cplx {
          const double wq = std::sqrt(q * q + sb.mass * sb.mass);
          const fields::Vec2 P{wp + wq, p + q};
          return std::conj(fields::gaussian_ft(f, P)) * fields::gaussian_ft(g, P) /
                 (4.0 * wp * wq);
        };
        return quad::integrate_line(inner, 25.0, 1e-11);
      };
      const cplx val = quad::integrate_line(outer, 25.0, 1e-10);
      total += sa.mu_weight * sb.mu_weight * val;
    }
  }
  return model.c_norm() * model.c_norm() * total;
}

}  // namespace

TEST_CASE("contracted_integral: empty contraction gives the Gaussian normalization") {
  const auto model = TwoPointModel::pv_pair(1.0, 2.0);
  const GaussianSpec f{{0.3, -0.2}, {0.0, 0.1}, 1.2};
  const GaussianSpec g{{-0.1, 0.4}, {-0.05, 0.0}, 0.9};
  PairingMultiIndex K0(2);
  const cplx v = contracted_integral(model, {{f}}, {{g}}, K0);
  CHECK(std::abs(v - cplx(1.0, 0.0)) <= 1e-9);
}

TEST_CASE("contracted_integral: k = 1 equals the momentum-space smeared form") {
  // x-space contour route vs p-space shell quadrature: the analyticity of the
  // majorant made testable
  const auto model = TwoPointModel::pv_pair(1.0, 2.0);
  const GaussianSpec f{{0.4, 0.1}, {0.0, 0.0}, 1.0};
  const GaussianSpec g{{-0.2, 0.6}, {0.0, 0.0}, 1.4};
  PairingMultiIndex K(2);
  K.at(0, 1) = 1;
  for (auto which : {Which::Majorant, Which::Indefinite}) {
    Options opts;
    opts.cross_kernel = which;
    const cplx xspace = contracted_integral(model, {{f}}, {{g}}, K, opts);
    const cplx pspace = fields::smeared_form(model, f, g, which);
    CHECK(std::abs(xspace - pspace) <= 1e-6 * std::abs(pspace));
  }
}

TEST_CASE("contracted_integral is invariant under the contour stagger") {
  const auto model = TwoPointModel::pv_pair(1.0, 2.0);
  const GaussianSpec f{{0.0, 0.0}, {0.0, 0.0}, 1.0};
  PairingMultiIndex K(2);
  K.at(0, 1) = 3;
  Options a, b;
  a.stagger = 0.35;
  b.stagger = 0.6;
  const cplx va = contracted_integral(model, {{f}}, {{f}}, K, a);
  const cplx vb = contracted_integral(model, {{f}}, {{f}}, K, b);
  CHECK(std::abs(va - vb) <= 1e-6 * std::abs(va));
}

TEST_CASE("monomial_inner: vacuum, single, and double contractions") {
  const auto model = TwoPointModel::pv_pair(1.0, 2.0);
  const GaussianSpec f{{0.2, -0.1}, {0.0, 0.0}, 1.0};
  const GaussianSpec g{{-0.3, 0.2}, {0.0, 0.0}, 1.2};

  const cplx v0 = wick::monomial_inner(0, f, g, Which::Majorant, model);
  CHECK(std::abs(v0 - cplx(1.0, 0.0)) <= 1e-9);

  const cplx v1 = wick::monomial_inner(1, f, g, Which::Majorant, model);
  const cplx sm = fields::smeared_form(model, f, g, Which::Majorant);
  CHECK(std::abs(v1 - sm) <= 1e-6 * std::abs(sm));

  const cplx v2 = wick::monomial_inner(2, f, g, Which::Majorant, model);
  const cplx want = 2.0 * i2_oracle(model, f, g);
  CHECK(std::abs(v2 - want) <= 1e-6 * std::abs(want));
}

TEST_CASE("monomial_inner: Fock positivity on the diagonal up to k = 6") {
  const auto model = TwoPointModel::pv_pair(1.0, 2.0);
  const GaussianSpec f{{0.1, 0.3}, {0.0, 0.0}, 1.1};
  for (int k = 0; k <= 6; ++k) {
    const cplx v = wick::monomial_inner(k, f, f, Which::Majorant, model);
    CHECK(v.real() > 0.0);
    CHECK(std::abs(v.imag()) <= 1e-9 * v.real() + 1e-20);
  }
}

TEST_CASE("four-vertex batch: empty contraction normalizes to one") {
  const auto model = TwoPointModel::pv_pair(1.0, 2.0);
  const GaussianSpec f1{{0.2, 0.0}, {0.0, 0.0}, 1.0};
  const GaussianSpec f2{{-0.4, 0.5}, {0.0, 0.0}, 1.3};
  PairingMultiIndex K0(4);
  Options opts;
  opts.hermite_nodes = 16;
  const cplx v = contracted_integral(model, {{f1, f2}}, {{f1, f2}}, K0, opts);
  CHECK(std::abs(v - cplx(1.0, 0.0)) <= 1e-7);
}

TEST_CASE("four-vertex batch: factorized pattern matches the product of 2-vertex values") {
  // cross-only contractions pairing (0,2) and (1,3) with identical widths
  // factorize into two independent 2-point diagrams when the Gaussians are
  // far apart (cluster separation); here we instead check against the same
  // integral computed with swapped vertex labels, an exact symmetry
  const auto model = TwoPointModel::pv_pair(1.0, 2.0);
  const GaussianSpec fa{{0.0, 0.0}, {0.0, 0.0}, 1.0};
  const GaussianSpec fb{{0.3, -0.2}, {0.0, 0.0}, 1.0};
  PairingMultiIndex K(4);
  K.at(0, 2) = 1;
  K.at(1, 3) = 2;
  PairingMultiIndex Kswap(4);
  Kswap.at(1, 3) = 1;
  Kswap.at(0, 2) = 2;
  Options opts;
  opts.hermite_nodes = 10;
  const cplx v1 = contracted_integral(model, {{fa, fb}}, {{fa, fb}}, K, opts);
  const cplx v2 = contracted_integral(model, {{fb, fa}}, {{fb, fa}}, Kswap, opts);
  CHECK(std::abs(v1 - v2) <= 5e-4 * std::abs(v1));
}

TEST_CASE("norm pattern maps: recursion route equals multi-index route exactly") {
  for (int n : {1, 2}) {
    const int cap = n == 1 ? 6 : 4;
    const auto rec = norm_patterns_by_recursion(n, cap);
    const auto mi = norm_patterns_by_multiindex(n, cap);
    REQUIRE(rec.size() == mi.size());
    for (const auto& [K, coeff] : mi) {
      const auto it = rec.find(K);
      REQUIRE(it != rec.end());
      CHECK(it->second == coeff);
    }
  }
}

TEST_CASE("norm value: both routes agree through the shared kernel cache (n = 1)") {
  const auto model = TwoPointModel::pv_pair(1.0, 2.0);
  const auto d = wick::CoefficientSequence::exponential(1.0);
  const GaussianSpec f{{0.0, 0.0}, {0.0, 0.0}, 1.0};

  const int cap = 5;
  Options opts;
  KernelIntegralCache cache(model, {f}, {f}, opts);
  const auto mi = norm_patterns_by_multiindex(1, cap);
  const cplx via_patterns = norm_sq_from_patterns(mi, d, cache);

  // direct route: orthogonality in the Wick degree + diagonal monomial values
  cplx direct{0.0, 0.0};
  for (int k = 0; k <= cap; ++k) {
    const double dk = std::exp(d.log_abs(k));
    direct += dk * dk * wick::monomial_inner(k, f, f, Which::Majorant, model);
  }
  CHECK(std::abs(via_patterns - direct) <= 1e-8 * std::abs(direct));
}
