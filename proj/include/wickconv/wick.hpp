#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "wickconv/fields.hpp"

namespace wickconv::wick {

using cplx = std::complex<double>;
using BigInt = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// Permanent (Ryser, Gray-code update, O(2^n n)). Works over complex doubles
// and over exact integer types alike.
// ---------------------------------------------------------------------------

template <class T>
T permanent(std::span<const T> a, int n) {
  if (n < 1 || static_cast<std::size_t>(n) * n != a.size())
    throw std::invalid_argument("permanent: matrix must be square and nonempty");
  if (n > 20) throw std::invalid_argument("permanent: n > 20 not supported");
  std::vector<T> row_sum(static_cast<std::size_t>(n), T{});
  T total{};
  const std::uint32_t full = n == 32 ? ~0u : ((1u << n) - 1u);
  std::uint32_t gray_prev = 0;
  for (std::uint32_t i = 1; i <= full; ++i) {
    const std::uint32_t gray = i ^ (i >> 1);
    const std::uint32_t diff = gray ^ gray_prev;
    int bit = 0;
    while (!((diff >> bit) & 1u)) ++bit;
    const bool added = gray & diff;
    for (int r = 0; r < n; ++r) {
      const T& entry = a[static_cast<std::size_t>(r) * n + bit];
      if (added)
        row_sum[r] += entry;
      else
        row_sum[r] -= entry;
    }
    gray_prev = gray;
    T prod = row_sum[0];
    for (int r = 1; r < n; ++r) prod *= row_sum[r];
    int bits = 0;
    for (std::uint32_t g = gray; g; g >>= 1) bits += g & 1u;
    if ((n - bits) % 2 == 0)
      total += prod;
    else
      total -= prod;
  }
  return total;
}

cplx permanent(const std::vector<cplx>& a, int n);
BigInt permanent_exact(const std::vector<BigInt>& a, int n);

// Gram matrix of smeared forms, entries <f_j, g_m> (indefinite) or
// (f_j, g_m) (majorant).
struct GramMatrix {
  int n = 0;
  std::vector<cplx> a;  // row-major
  static GramMatrix build(const fields::TwoPointModel& model,
                          std::span<const fields::GaussianSpec> f,
                          std::span<const fields::GaussianSpec> g, fields::Which which);
  // smallest eigenvalue of the Hermitian part, for positivity checks
  double min_eigenvalue_hermitian() const;
};

// ---------------------------------------------------------------------------
// Pairing multi-indices K = {k_jm, 1 <= j < m <= 2n}
// ---------------------------------------------------------------------------

struct PairingMultiIndex {
  int two_n = 2;
  std::vector<int> k;  // upper triangle, row-major pairs (0,1), (0,2), ...

  explicit PairingMultiIndex(int vertices)
      : two_n(vertices), k(static_cast<std::size_t>(vertices) * (vertices - 1) / 2, 0) {}

  static std::size_t pair_index(int j, int m, int two_n);
  int at(int j, int m) const { return k[pair_index(j, m, two_n)]; }
  int& at(int j, int m) { return k[pair_index(j, m, two_n)]; }

  std::vector<std::int64_t> degrees() const;  // kappa_j, j = 0..2n-1
  std::int64_t total() const;                 // |K|
  bool operator<(const PairingMultiIndex& o) const { return k < o.k; }
  bool operator==(const PairingMultiIndex& o) const { return two_n == o.two_n && k == o.k; }
};

struct EnumStatus {
  bool infeasible = false;  // constraint cannot be met (e.g. odd total degree)
  std::uint64_t count = 0;
};

// All K with prescribed vertex degrees, lexicographic in the flattened upper
// triangle. Requires 2n <= 8.
EnumStatus enumerate_by_degrees(std::span<const std::int64_t> kappa,
                                const std::function<void(const PairingMultiIndex&)>& sink);

// All K with |K| = total, for 2n vertices. Requires total <= 40.
EnumStatus enumerate_by_total(int two_n, int total,
                              const std::function<void(const PairingMultiIndex&)>& sink);

// ---------------------------------------------------------------------------
// Coefficient sequences d_k (log magnitudes)
// ---------------------------------------------------------------------------

class CoefficientSequence {
 public:
  enum class Kind { Exponential, Monomial, Table };

  static CoefficientSequence exponential(double g);       // d_k = g^k / k!
  static CoefficientSequence monomial(int degree);        // delta_{k,N}
  static CoefficientSequence table_abs(const std::vector<double>& magnitudes);
  static CoefficientSequence table_log(std::vector<double> log_magnitudes);

  // ln |d_k|; -inf where d_k = 0. Throws past a table's range.
  double log_abs(std::int64_t k) const;
  bool finite_support() const;
  std::int64_t support_max() const;  // largest k with d_k != 0 (finite support only)
  std::int64_t table_max() const;    // validity range for tables; huge for families
  Kind kind() const { return kind_; }
  double coupling() const { return g_; }
  bool d1_nonzero() const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::Exponential;
  double g_ = 1.0;
  int degree_ = 0;
  std::vector<double> log_mag_;
};

// Exact combinatorial factor kappa!/K! = prod_j multinomial(kappa_j; {k_jm}).
BigInt pairing_weight_exact(const PairingMultiIndex& K);

// ln D_K = ln(kappa!/K!) + sum_j ln |d_{kappa_j}|.
double dk_log(const PairingMultiIndex& K, const CoefficientSequence& d);

// Number of perfect leg-pairings of the degree profile, pairs restricted by
// `allowed`; memoized residual-degree recursion. Independent of enumerate_*.
BigInt count_pairings(std::vector<int> degrees,
                      const std::function<bool(int, int)>& allowed);

// ---------------------------------------------------------------------------
// Normal ordering of products of Wick monomials
// ---------------------------------------------------------------------------

// A term of the totally normal-ordered expansion: counts of contractions per
// vertex pair plus the residual (uncontracted) degree of each vertex.
struct NormalOrderTerm {
  std::vector<int> contractions;  // upper triangle, same layout as PairingMultiIndex
  std::vector<int> residual;      // per vertex
  bool operator<(const NormalOrderTerm& o) const {
    if (contractions != o.contractions) return contractions < o.contractions;
    return residual < o.residual;
  }
};

using NormalOrderExpansion = std::map<NormalOrderTerm, BigInt>;

// Applies the one-field pull-through recursion repeatedly to express
// :phi^{k_1}:(x_1) ... :phi^{k_n}:(x_n) in totally normal-ordered form.
// Coefficients are exact integers. Requires sum k_j <= 12.
NormalOrderExpansion normal_order_reduce(std::span<const int> degrees);

// Pattern-resolved counts of complete bipartite leg matchings between residual
// degrees a (bra) and b (ket): closed multinomial formula, used to assemble
// vacuum inner products from two reduced sides.
std::map<std::vector<int>, BigInt> bipartite_pattern_counts(const std::vector<int>& a,
                                                            const std::vector<int>& b);

// ---------------------------------------------------------------------------
// W^K kernels and diagonal monomial inner products
// ---------------------------------------------------------------------------

// Pointwise W^K at a complexified point tuple (first n points in the backward
// tube stagger, last n forward); blocks: j<m<=n uses w(z_m - z_j), ket block
// uses w(z_j - z_m), cross block uses w_maj(z_j, z_m).
cplx wk_eval(const fields::TwoPointModel& model, const PairingMultiIndex& K,
             std::span<const fields::CVec2> points);

// (:phi^k:(f) Psi0, :phi^k:(g) Psi0)-type diagonal value:
// k! * int ker(x1,x2)^k conj(f)(x1) g(x2); k = 0 gives (int conj f)(int g).
cplx monomial_inner(int k, const fields::GaussianSpec& f, const fields::GaussianSpec& g,
                    fields::Which which, const fields::TwoPointModel& model);

}  // namespace wickconv::wick
