#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "wickconv/numerics.hpp"
#include "wickconv/wick.hpp"

using namespace wickconv;
using namespace wickconv::wick;

namespace {

// n!-term reference permanent
cplx permanent_brute(const std::vector<cplx>& a, int n) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  cplx total{0.0, 0.0};
  do {
    cplx prod{1.0, 0.0};
    for (int i = 0; i < n; ++i) prod *= a[static_cast<std::size_t>(i) * n + perm[i]];
    total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

// enumerate labeled-leg perfect matchings of a degree profile; classify by
// pairing pattern; no same-vertex pairs
void matchings_by_pattern(std::vector<int>& legs_left, PairingMultiIndex& pattern,
                          std::map<std::vector<int>, BigInt>& out) {
  int j = -1;
  for (std::size_t i = 0; i < legs_left.size(); ++i)
    if (legs_left[i] > 0) {
      j = static_cast<int>(i);
      break;
    }
  if (j < 0) {
    out[pattern.k] += 1;
    return;
  }
  for (int m = 0; m < static_cast<int>(legs_left.size()); ++m) {
    if (m == j || legs_left[m] == 0) continue;
    const int ways = legs_left[m];
    legs_left[j] -= 1;
    legs_left[m] -= 1;
    pattern.at(std::min(j, m), std::max(j, m)) += 1;
    std::map<std::vector<int>, BigInt> sub;
    matchings_by_pattern(legs_left, pattern, sub);
    for (auto& [k, c] : sub) out[k] += c * ways;
    pattern.at(std::min(j, m), std::max(j, m)) -= 1;
    legs_left[j] += 1;
    legs_left[m] += 1;
  }
}

}  // namespace

TEST_CASE("permanent: small exact cases") {
  CHECK(permanent({cplx(5.0, 1.0)}, 1) == cplx(5.0, 1.0));
  CHECK(permanent({cplx(1), cplx(2), cplx(3), cplx(4)}, 2) == cplx(10.0));
  CHECK_THROWS(permanent(std::vector<cplx>{cplx(1), cplx(2)}, 2));
}

TEST_CASE("permanent: Ryser vs n!-sum on random complex matrices") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 6;
    std::vector<cplx> a(static_cast<std::size_t>(n) * n);
    for (auto& e : a) e = cplx(u(rng), u(rng));
    const cplx fast = permanent(a, n);
    const cplx slow = permanent_brute(a, n);
    CHECK(std::abs(fast - slow) <= 1e-12 * std::abs(slow));
  }
}

TEST_CASE("permanent: exact integer mode") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> u(-9, 9);
  const int n = 5;
  std::vector<BigInt> a(static_cast<std::size_t>(n) * n);
  std::vector<cplx> ad(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int v = u(rng);
    a[i] = v;
    ad[i] = cplx(v, 0.0);
  }
  const BigInt exact = permanent_exact(a, n);
  const cplx approx = permanent_brute(ad, n);
  CHECK(static_cast<double>(exact) == doctest::Approx(approx.real()));
}

TEST_CASE("permanent multilinearity in a row") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 5;
  std::vector<cplx> a(static_cast<std::size_t>(n) * n);
  for (auto& e : a) e = cplx(u(rng), u(rng));
  const cplx base = permanent(a, n);
  const cplx lambda(0.7, -0.4);
  auto scaled = a;
  for (int c = 0; c < n; ++c) scaled[static_cast<std::size_t>(2) * n + c] *= lambda;
  CHECK(std::abs(permanent(scaled, n) - lambda * base) <= 1e-12 * std::abs(base));
}

TEST_CASE("enumerate_by_degrees: counts and flags") {
  std::vector<PairingMultiIndex> got;
  auto sink = [&](const PairingMultiIndex& K) { got.push_back(K); };

  const std::int64_t k2[] = {3, 3};
  auto st = enumerate_by_degrees(k2, sink);
  CHECK(st.count == 1);
  CHECK(got[0].at(0, 1) == 3);

  got.clear();
  const std::int64_t k4[] = {1, 1, 1, 1};
  st = enumerate_by_degrees(k4, sink);
  CHECK(st.count == 3);  // perfect matchings of 4 points

  got.clear();
  const std::int64_t odd[] = {1, 1, 1};
  st = enumerate_by_degrees(odd, sink);
  CHECK(st.infeasible);
  CHECK(st.count == 0);

  got.clear();
  const std::int64_t stuck[] = {2, 0};
  st = enumerate_by_degrees(stuck, sink);
  CHECK(st.infeasible);
}

TEST_CASE("enumerate_by_total: stars-and-bars count, zero index") {
  std::uint64_t count = 0;
  auto st = enumerate_by_total(4, 0, [&](const PairingMultiIndex& K) {
    ++count;
    CHECK(K.total() == 0);
  });
  CHECK(st.count == 1);

  // N = 5 into C(4,2) = 6 slots: C(10, 5) = 252
  st = enumerate_by_total(4, 5, [&](const PairingMultiIndex&) {});
  CHECK(st.count == 252);

  // lexicographic and duplicate-free
  std::vector<std::vector<int>> seen;
  enumerate_by_total(4, 2, [&](const PairingMultiIndex& K) { seen.push_back(K.k); });
  for (std::size_t i = 1; i < seen.size(); ++i) CHECK(seen[i - 1] < seen[i]);
}

TEST_CASE("pairing_weight_exact matches per-pattern brute-force matchings") {
  for (const std::vector<int> prof :
       {std::vector<int>{2, 2}, {3, 1, 2}, {2, 1, 2, 1}, {3, 3, 2}}) {
    const int v = static_cast<int>(prof.size());
    std::vector<int> legs = prof;
    PairingMultiIndex pat(v);
    std::map<std::vector<int>, BigInt> brute;
    matchings_by_pattern(legs, pat, brute);
    std::vector<std::int64_t> kappa(prof.begin(), prof.end());
    std::uint64_t seen = 0;
    enumerate_by_degrees(kappa, [&](const PairingMultiIndex& K) {
      ++seen;
      const auto it = brute.find(K.k);
      REQUIRE(it != brute.end());
      CHECK(pairing_weight_exact(K) == it->second);
    });
    CHECK(seen == brute.size());
  }
}

TEST_CASE("count identity: sum over K of kappa!/K! equals the pairing count") {
  // all degree profiles with 2n = 4, kappa_j <= 3 (acceptance widens to 2n = 6)
  auto all_pairs = [](int, int) { return true; };
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b)
      for (int c = 0; c <= 3; ++c)
        for (int d = 0; d <= 3; ++d) {
          if ((a + b + c + d) % 2 != 0) continue;
          const std::int64_t kappa[] = {a, b, c, d};
          BigInt lhs = 0;
          enumerate_by_degrees(kappa, [&](const PairingMultiIndex& K) {
            lhs += pairing_weight_exact(K);
          });
          const BigInt rhs = count_pairings({a, b, c, d}, all_pairs);
          CHECK(lhs == rhs);
        }
}

TEST_CASE("dk coefficients") {
  const auto d = CoefficientSequence::exponential(1.0);

  PairingMultiIndex K2(2);
  K2.at(0, 1) = 4;  // D_K = 4! |d_4|^2
  CHECK(dk_log(K2, d) ==
        doctest::Approx(num::log_factorial(4) + 2.0 * d.log_abs(4)).epsilon(1e-13));
  CHECK(pairing_weight_exact(K2) == BigInt(24));

  PairingMultiIndex K0(4);  // |K| = 0: D_K = |d_0|^{2n}
  CHECK(dk_log(K0, d) == doctest::Approx(4.0 * d.log_abs(0)));
  CHECK(pairing_weight_exact(K0) == BigInt(1));

  // 2n = 4, all kappa_j = 1: any matching has kappa!/K! = 1, D_K = |d_1|^4
  PairingMultiIndex Km(4);
  Km.at(0, 2) = 1;
  Km.at(1, 3) = 1;
  CHECK(pairing_weight_exact(Km) == BigInt(1));
  CHECK(dk_log(Km, d) == doctest::Approx(4.0 * d.log_abs(1)));

  const auto dm = CoefficientSequence::monomial(3);
  PairingMultiIndex Kz(2);
  Kz.at(0, 1) = 2;  // kappa = (2,2), d_2 = 0
  CHECK(dk_log(Kz, dm) == num::kNegInf);
}

TEST_CASE("coefficient sequences") {
  const auto de = CoefficientSequence::exponential(2.0);
  CHECK(de.log_abs(3) == doctest::Approx(3.0 * std::log(2.0) - std::log(6.0)));
  CHECK(!de.finite_support());
  CHECK(de.d1_nonzero());

  const auto dm = CoefficientSequence::monomial(3);
  CHECK(dm.log_abs(3) == 0.0);
  CHECK(dm.log_abs(2) == num::kNegInf);
  CHECK(dm.finite_support());
  CHECK(dm.support_max() == 3);
  CHECK(!dm.d1_nonzero());

  const auto dz = CoefficientSequence::exponential(0.0);
  CHECK(dz.log_abs(0) == 0.0);
  CHECK(dz.log_abs(1) == num::kNegInf);
  CHECK(dz.finite_support());

  const auto dt = CoefficientSequence::table_abs({1.0, 0.5, 0.0, 0.25});
  CHECK(dt.log_abs(1) == doctest::Approx(std::log(0.5)));
  CHECK(dt.log_abs(2) == num::kNegInf);
  CHECK(dt.support_max() == 3);
  CHECK_THROWS(dt.log_abs(4));
}

TEST_CASE("normal_order_reduce: base cases and the (1,4,2) expansion") {
  // single factor: itself, coefficient 1
  const int single[] = {5};
  const auto es = normal_order_reduce(single);
  REQUIRE(es.size() == 1);
  CHECK(es.begin()->first.residual == std::vector<int>{5});
  CHECK(es.begin()->second == BigInt(1));

  // :phi:(f) :phi:(g) -> :phi phi: + one contraction
  const int two1[] = {1, 1};
  const auto e11 = normal_order_reduce(two1);
  REQUIRE(e11.size() == 2);
  for (const auto& [t, c] : e11) {
    CHECK(c == BigInt(1));
    if (t.contractions[0] == 1)
      CHECK(t.residual == std::vector<int>{0, 0});
    else
      CHECK(t.residual == std::vector<int>{1, 1});
  }

  // :phi^2:(f) :phi^2:(g) -> coefficients (1, 4, 2) for 0, 1, 2 contractions
  const int two2[] = {2, 2};
  const auto e22 = normal_order_reduce(two2);
  REQUIRE(e22.size() == 3);
  for (const auto& [t, c] : e22) {
    if (t.contractions[0] == 0) CHECK(c == BigInt(1));
    if (t.contractions[0] == 1) CHECK(c == BigInt(4));
    if (t.contractions[0] == 2) CHECK(c == BigInt(2));
  }

  CHECK_THROWS(normal_order_reduce(std::vector<int>{7, 6}));  // cap
}

TEST_CASE("normal_order_reduce: fully contracted coefficients equal kappa!/K!") {
  for (const std::vector<int> prof : {std::vector<int>{2, 2}, {3, 1, 2}, {2, 2, 2}}) {
    const auto exp = normal_order_reduce(prof);
    const int n = static_cast<int>(prof.size());
    for (const auto& [t, c] : exp) {
      bool full = true;
      for (int r : t.residual)
        if (r != 0) full = false;
      if (!full) continue;
      PairingMultiIndex K(n);
      K.k = t.contractions;
      CHECK(c == pairing_weight_exact(K));
    }
  }
}

TEST_CASE("bipartite_pattern_counts: formula and total") {
  const auto m = bipartite_pattern_counts({1, 1}, {2});
  REQUIRE(m.size() == 1);
  CHECK(m.begin()->second == BigInt(2));

  // total over patterns equals the masked pairing count
  const std::vector<int> a{2, 1}, b{1, 2};
  const auto pats = bipartite_pattern_counts(a, b);
  BigInt total = 0;
  for (const auto& [x, c] : pats) total += c;
  auto mask = [&](int i, int j) {
    const int na = static_cast<int>(a.size());
    return (i < na) != (j < na);
  };
  CHECK(total == count_pairings({2, 1, 1, 2}, mask));

  CHECK(bipartite_pattern_counts({1}, {2}).empty());  // unbalanced
}

TEST_CASE("count_pairings basics") {
  auto all = [](int, int) { return true; };
  CHECK(count_pairings({1, 1, 1, 1}, all) == BigInt(3));
  CHECK(count_pairings({2, 2}, all) == BigInt(2));
  CHECK(count_pairings({1, 1, 1}, all) == BigInt(0));  // odd
  CHECK(count_pairings({}, all) == BigInt(1));
}

TEST_CASE("wk_eval: empty product, single-pair power, factor recomputation") {
  const auto model = fields::TwoPointModel::pv_pair(1.0, 2.0);

  PairingMultiIndex K0(2);
  const fields::CVec2 pts2[] = {{cplx(0.1, -0.4), cplx(0.2, 0.0)}, {cplx(-0.1, 0.4), cplx(0.0, 0.1)}};
  CHECK(wk_eval(model, K0, pts2) == cplx(1.0, 0.0));

  PairingMultiIndex K(2);
  K.at(0, 1) = 3;
  const cplx base = fields::eval_kernel(model, pts2[0] - pts2[1], fields::Which::Majorant);
  const cplx got = wk_eval(model, K, pts2);
  CHECK(std::abs(got - base * base * base) <= 1e-13 * std::abs(got));

  // 2n = 4: log |W^K| equals the sum of k_jm log |factor|
  PairingMultiIndex K4(4);
  K4.at(0, 1) = 1;
  K4.at(0, 2) = 2;
  K4.at(1, 3) = 1;
  K4.at(2, 3) = 2;
  const fields::CVec2 pts4[] = {{cplx(0.3, -0.2), cplx(0.5, 0.0)},
                                {cplx(0.1, -0.5), cplx(-0.2, 0.1)},
                                {cplx(-0.3, 0.2), cplx(0.4, 0.0)},
                                {cplx(0.2, 0.6), cplx(0.0, -0.1)}};
  double log_sum = 0.0;
  log_sum += 1.0 * std::log(std::abs(fields::eval_kernel(
                 model, pts4[1] - pts4[0], fields::Which::Indefinite)));
  log_sum += 2.0 * std::log(std::abs(fields::eval_kernel(
                 model, pts4[0] - pts4[2], fields::Which::Majorant)));
  log_sum += 1.0 * std::log(std::abs(fields::eval_kernel(
                 model, pts4[1] - pts4[3], fields::Which::Majorant)));
  log_sum += 2.0 * std::log(std::abs(fields::eval_kernel(
                 model, pts4[2] - pts4[3], fields::Which::Indefinite)));
  CHECK(std::log(std::abs(wk_eval(model, K4, pts4))) == doctest::Approx(log_sum).epsilon(1e-10));
}

TEST_CASE("GramMatrix: majorant diagonal family is positive semidefinite") {
  const auto model = fields::TwoPointModel::pv_pair(1.0, 2.0);
  std::vector<fields::GaussianSpec> fs;
  fs.push_back({{0.0, 0.0}, {0.0, 0.0}, 1.0});
  fs.push_back({{1.0, -0.5}, {0.0, 0.0}, 1.5});
  fs.push_back({{-0.7, 0.3}, {0.1, 0.0}, 0.8});
  const auto gm = wick::GramMatrix::build(model, fs, fs, fields::Which::Majorant);
  CHECK(gm.min_eigenvalue_hermitian() >= -1e-10);
}
