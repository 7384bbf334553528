#include "wickconv/wick.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "wickconv/diagram.hpp"
#include "wickconv/numerics.hpp"

namespace wickconv::wick {

cplx permanent(const std::vector<cplx>& a, int n) {
  return permanent<cplx>(std::span<const cplx>(a), n);
}

BigInt permanent_exact(const std::vector<BigInt>& a, int n) {
  return permanent<BigInt>(std::span<const BigInt>(a), n);
}

GramMatrix GramMatrix::build(const fields::TwoPointModel& model,
                             std::span<const fields::GaussianSpec> f,
                             std::span<const fields::GaussianSpec> g, fields::Which which) {
  if (f.size() != g.size() || f.empty())
    throw std::invalid_argument("GramMatrix::build: need matching nonempty rows/cols");
  GramMatrix gm;
  gm.n = static_cast<int>(f.size());
  gm.a.resize(f.size() * f.size());
  for (std::size_t j = 0; j < f.size(); ++j)
    for (std::size_t m = 0; m < g.size(); ++m)
      gm.a[j * f.size() + m] = fields::smeared_form(model, f[j], g[m], which);
  return gm;
}

double GramMatrix::min_eigenvalue_hermitian() const {
  // realification: the 2n x 2n symmetric [[Re H, -Im H], [Im H, Re H]] carries
  // the Hermitian part's spectrum with doubled multiplicity
  const int n2 = 2 * n;
  std::vector<double> m(static_cast<std::size_t>(n2) * n2, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const cplx h = 0.5 * (a[static_cast<std::size_t>(j) * n + k] +
                            std::conj(a[static_cast<std::size_t>(k) * n + j]));
      m[static_cast<std::size_t>(j) * n2 + k] = h.real();
      m[static_cast<std::size_t>(j) * n2 + (n + k)] = -h.imag();
      m[static_cast<std::size_t>(n + j) * n2 + k] = h.imag();
      m[static_cast<std::size_t>(n + j) * n2 + (n + k)] = h.real();
    }
  }
  std::vector<double> evals, evecs;
  num::sym_eig(n2, m, evals, evecs);
  return *std::min_element(evals.begin(), evals.end());
}

std::size_t PairingMultiIndex::pair_index(int j, int m, int two_n) {
  if (!(0 <= j && j < m && m < two_n))
    throw std::invalid_argument("pair_index: need 0 <= j < m < 2n");
  return static_cast<std::size_t>(j) * two_n - static_cast<std::size_t>(j) * (j + 1) / 2 +
         static_cast<std::size_t>(m - j - 1);
}

std::vector<std::int64_t> PairingMultiIndex::degrees() const {
  std::vector<std::int64_t> kappa(two_n, 0);
  for (int j = 0; j < two_n; ++j)
    for (int m = j + 1; m < two_n; ++m) {
      const int c = at(j, m);
      kappa[j] += c;
      kappa[m] += c;
    }
  return kappa;
}

std::int64_t PairingMultiIndex::total() const {
  std::int64_t t = 0;
  for (int c : k) t += c;
  return t;
}

namespace {

void enumerate_degrees_rec(PairingMultiIndex& K, std::vector<std::int64_t>& res, int j, int m,
                           EnumStatus& st,
                           const std::function<void(const PairingMultiIndex&)>& sink) {
  const int two_n = K.two_n;
  if (j == two_n - 1) {
    bool done = true;
    for (std::int64_t r : res)
      if (r != 0) done = false;
    if (done) {
      ++st.count;
      sink(K);
    }
    return;
  }
  if (m == two_n) {
    // row j is complete and vertex j appears in no later pair
    if (res[j] != 0) return;
    enumerate_degrees_rec(K, res, j + 1, j + 2, st, sink);
    return;
  }
  const int cmax = static_cast<int>(std::min(res[j], res[m]));
  for (int c = 0; c <= cmax; ++c) {
    K.at(j, m) = c;
    res[j] -= c;
    res[m] -= c;
    enumerate_degrees_rec(K, res, j, m + 1, st, sink);
    res[j] += c;
    res[m] += c;
  }
  K.at(j, m) = 0;
}

}  // namespace

EnumStatus enumerate_by_degrees(std::span<const std::int64_t> kappa,
                                const std::function<void(const PairingMultiIndex&)>& sink) {
  const int two_n = static_cast<int>(kappa.size());
  if (two_n < 2 || two_n > 8)
    throw std::invalid_argument("enumerate_by_degrees: need 2 <= 2n <= 8");
  EnumStatus st;
  std::int64_t total = 0;
  for (std::int64_t d : kappa) {
    if (d < 0) throw std::invalid_argument("enumerate_by_degrees: negative degree");
    total += d;
  }
  if (total % 2 != 0) {
    st.infeasible = true;
    return st;
  }
  PairingMultiIndex K(two_n);
  std::vector<std::int64_t> res(kappa.begin(), kappa.end());
  enumerate_degrees_rec(K, res, 0, 1, st, sink);
  if (st.count == 0 && total > 0) st.infeasible = true;
  return st;
}

EnumStatus enumerate_by_total(int two_n, int total,
                              const std::function<void(const PairingMultiIndex&)>& sink) {
  if (two_n < 2 || two_n > 8) throw std::invalid_argument("enumerate_by_total: need 2 <= 2n <= 8");
  if (total < 0 || total > 40) throw std::invalid_argument("enumerate_by_total: need 0 <= N <= 40");
  EnumStatus st;
  PairingMultiIndex K(two_n);
  const int slots = static_cast<int>(K.k.size());
  // lexicographic compositions of `total` into `slots` parts
  std::function<void(int, int)> rec = [&](int slot, int remaining) {
    if (slot == slots - 1) {
      K.k[static_cast<std::size_t>(slot)] = remaining;
      ++st.count;
      sink(K);
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      K.k[static_cast<std::size_t>(slot)] = c;
      rec(slot + 1, remaining - c);
    }
  };
  rec(0, total);
  return st;
}

CoefficientSequence CoefficientSequence::exponential(double g) {
  if (!(g >= 0.0)) throw std::invalid_argument("CoefficientSequence::exponential: g must be >= 0");
  CoefficientSequence d;
  d.kind_ = Kind::Exponential;
  d.g_ = g;
  return d;
}

CoefficientSequence CoefficientSequence::monomial(int degree) {
  if (degree < 0) throw std::invalid_argument("CoefficientSequence::monomial: negative degree");
  CoefficientSequence d;
  d.kind_ = Kind::Monomial;
  d.degree_ = degree;
  return d;
}

CoefficientSequence CoefficientSequence::table_abs(const std::vector<double>& magnitudes) {
  std::vector<double> lm(magnitudes.size());
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    if (!(magnitudes[i] >= 0.0) || !std::isfinite(magnitudes[i]))
      throw std::invalid_argument(
          "CoefficientSequence::table_abs: magnitudes must be finite, >= 0");
    lm[i] = magnitudes[i] == 0.0 ? num::kNegInf : std::log(magnitudes[i]);
  }
  return table_log(std::move(lm));
}

CoefficientSequence CoefficientSequence::table_log(std::vector<double> log_magnitudes) {
  if (log_magnitudes.empty())
    throw std::invalid_argument("CoefficientSequence::table_log: empty table");
  CoefficientSequence d;
  d.kind_ = Kind::Table;
  d.log_mag_ = std::move(log_magnitudes);
  return d;
}

double CoefficientSequence::log_abs(std::int64_t k) const {
  if (k < 0) throw std::invalid_argument("CoefficientSequence: negative index");
  switch (kind_) {
    case Kind::Exponential:
      if (g_ == 0.0) return k == 0 ? 0.0 : num::kNegInf;
      return static_cast<double>(k) * std::log(g_) - num::log_factorial(k);
    case Kind::Monomial:
      return k == degree_ ? 0.0 : num::kNegInf;
    case Kind::Table:
      if (k >= static_cast<std::int64_t>(log_mag_.size()))
        throw std::out_of_range("CoefficientSequence: index past table");
      return log_mag_[static_cast<std::size_t>(k)];
  }
  return num::kNegInf;
}

bool CoefficientSequence::finite_support() const {
  return kind_ == Kind::Monomial || (kind_ == Kind::Exponential && g_ == 0.0) ||
         kind_ == Kind::Table;
}

std::int64_t CoefficientSequence::support_max() const {
  switch (kind_) {
    case Kind::Exponential:
      if (g_ == 0.0) return 0;
      throw std::logic_error("support_max: infinite support");
    case Kind::Monomial:
      return degree_;
    case Kind::Table:
      for (std::size_t i = log_mag_.size(); i-- > 0;)
        if (log_mag_[i] != num::kNegInf) return static_cast<std::int64_t>(i);
      return -1;
  }
  return -1;
}

std::int64_t CoefficientSequence::table_max() const {
  return kind_ == Kind::Table ? static_cast<std::int64_t>(log_mag_.size()) - 1
                              : (std::int64_t{1} << 40);
}

bool CoefficientSequence::d1_nonzero() const { return log_abs(1) != num::kNegInf; }

std::string CoefficientSequence::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Exponential:
      os << "exponential(g=" << g_ << ")";
      break;
    case Kind::Monomial:
      os << "monomial(N=" << degree_ << ")";
      break;
    case Kind::Table:
      os << "table(k_max=" << log_mag_.size() - 1 << ")";
      break;
  }
  return os.str();
}

namespace {

BigInt factorial_big(std::int64_t n) {
  BigInt f = 1;
  for (std::int64_t i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

BigInt pairing_weight_exact(const PairingMultiIndex& K) {
  // kappa!/K! = prod_j kappa_j! / prod_{j<m} k_jm!; exact, it counts the leg
  // pairings with pattern K
  const auto kappa = K.degrees();
  BigInt numer = 1;
  for (std::int64_t d : kappa) numer *= factorial_big(d);
  BigInt denom = 1;
  for (int c : K.k) denom *= factorial_big(c);
  return numer / denom;
}

double dk_log(const PairingMultiIndex& K, const CoefficientSequence& d) {
  const auto kappa = K.degrees();
  double lg = 0.0;
  for (std::int64_t deg : kappa) {
    if (deg > d.table_max()) {
      std::ostringstream os;
      os << "dk_log: degree " << deg << " beyond coefficient table";
      throw std::out_of_range(os.str());
    }
    lg += num::log_factorial(deg);
    const double la = d.log_abs(deg);
    if (la == num::kNegInf) return num::kNegInf;
    lg += la;
  }
  for (int c : K.k) lg -= num::log_factorial(c);
  return lg;
}

BigInt count_pairings(std::vector<int> degrees, const std::function<bool(int, int)>& allowed) {
  const int n = static_cast<int>(degrees.size());
  std::map<std::vector<int>, BigInt> memo;
  std::function<BigInt(std::vector<int>&)> rec = [&](std::vector<int>& res) -> BigInt {
    int j = -1;
    for (int i = 0; i < n; ++i)
      if (res[i] > 0) {
        j = i;
        break;
      }
    if (j < 0) return 1;
    const auto it = memo.find(res);
    if (it != memo.end()) return it->second;
    BigInt total = 0;
    for (int m = 0; m < n; ++m) {
      if (m == j || res[m] == 0) continue;
      if (!allowed(j, m)) continue;
      res[j] -= 1;
      res[m] -= 1;
      const BigInt sub = rec(res);
      res[j] += 1;
      res[m] += 1;
      total += BigInt(res[m]) * sub;
    }
    memo.emplace(res, total);
    return total;
  };
  return rec(degrees);
}

NormalOrderExpansion normal_order_reduce(std::span<const int> degrees) {
  const int n = static_cast<int>(degrees.size());
  if (n < 1) throw std::invalid_argument("normal_order_reduce: empty product");
  int total = 0;
  for (int d : degrees) {
    if (d < 0) throw std::invalid_argument("normal_order_reduce: negative degree");
    total += d;
  }
  if (total > 12) throw std::invalid_argument("normal_order_reduce: sum of degrees exceeds 12");

  const std::size_t pairs = n > 1 ? static_cast<std::size_t>(n) * (n - 1) / 2 : 0;
  NormalOrderTerm vacuum;
  vacuum.contractions.assign(pairs, 0);
  vacuum.residual.assign(static_cast<std::size_t>(n), 0);
  NormalOrderExpansion exp;
  exp.emplace(vacuum, BigInt(1));

  // one-field pull-through: phi(f) :A: = :phi(f) A: + contractions with the
  // legs of other blocks; legs of the same Wick monomial never contract
  for (int j = 0; j < n; ++j) {
    for (int atom = 0; atom < degrees[j]; ++atom) {
      NormalOrderExpansion next;
      for (const auto& [term, coef] : exp) {
        NormalOrderTerm t1 = term;
        t1.residual[static_cast<std::size_t>(j)] += 1;
        next[t1] += coef;
        for (int i = 0; i < n; ++i) {
          if (i == j) continue;
          const int avail = term.residual[static_cast<std::size_t>(i)];
          if (avail == 0) continue;
          NormalOrderTerm t2 = term;
          t2.residual[static_cast<std::size_t>(i)] -= 1;
          t2.contractions[PairingMultiIndex::pair_index(std::min(i, j), std::max(i, j), n)] += 1;
          next[t2] += coef * avail;
        }
      }
      exp = std::move(next);
    }
  }
  return exp;
}

std::map<std::vector<int>, BigInt> bipartite_pattern_counts(const std::vector<int>& a,
                                                            const std::vector<int>& b) {
  std::map<std::vector<int>, BigInt> out;
  const int na = static_cast<int>(a.size());
  const int nb = static_cast<int>(b.size());
  std::int64_t ta = 0, tb = 0;
  for (int v : a) ta += v;
  for (int v : b) tb += v;
  if (ta != tb) return out;
  std::vector<int> x(static_cast<std::size_t>(na) * nb, 0);
  std::vector<int> col_res(b.begin(), b.end());

  std::function<void(int, int, int)> rec = [&](int j, int m, int row_res) {
    if (j == na) {
      for (int c : col_res)
        if (c != 0) return;
      // matchings with pattern x: prod_j multinomial(a_j; x_j.) *
      // prod_m multinomial(b_m; x._m) * prod x_jm!
      BigInt c = 1;
      for (int jj = 0; jj < na; ++jj) {
        c *= factorial_big(a[static_cast<std::size_t>(jj)]);
        for (int mm = 0; mm < nb; ++mm)
          c /= factorial_big(x[static_cast<std::size_t>(jj) * nb + mm]);
      }
      for (int mm = 0; mm < nb; ++mm) {
        c *= factorial_big(b[static_cast<std::size_t>(mm)]);
        for (int jj = 0; jj < na; ++jj)
          c /= factorial_big(x[static_cast<std::size_t>(jj) * nb + mm]);
      }
      for (int v : x) c *= factorial_big(v);
      out.emplace(x, c);
      return;
    }
    if (m == nb) {
      if (row_res != 0) return;
      rec(j + 1, 0, j + 1 < na ? a[static_cast<std::size_t>(j + 1)] : 0);
      return;
    }
    const int cmax = std::min(row_res, col_res[static_cast<std::size_t>(m)]);
    for (int c = 0; c <= cmax; ++c) {
      x[static_cast<std::size_t>(j) * nb + m] = c;
      col_res[static_cast<std::size_t>(m)] -= c;
      rec(j, m + 1, row_res - c);
      col_res[static_cast<std::size_t>(m)] += c;
    }
    x[static_cast<std::size_t>(j) * nb + m] = 0;
  };
  rec(0, 0, na > 0 ? a[0] : 0);
  return out;
}

namespace {

cplx ipow(cplx base, int e) {
  cplx r{1.0, 0.0};
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

}  // namespace

cplx wk_eval(const fields::TwoPointModel& model, const PairingMultiIndex& K,
             std::span<const fields::CVec2> points) {
  if (static_cast<int>(points.size()) != K.two_n)
    throw std::invalid_argument("wk_eval: point count must match 2n");
  if (K.two_n % 2 != 0) throw std::invalid_argument("wk_eval: 2n must be even");
  const int n = K.two_n / 2;
  cplx value{1.0, 0.0};
  for (int j = 0; j < K.two_n; ++j) {
    for (int m = j + 1; m < K.two_n; ++m) {
      const int c = K.at(j, m);
      if (c == 0) continue;
      cplx factor;
      if (m < n) {
        factor = fields::eval_kernel(model, points[m] - points[j], fields::Which::Indefinite);
      } else if (j >= n) {
        factor = fields::eval_kernel(model, points[j] - points[m], fields::Which::Indefinite);
      } else {
        factor = fields::eval_kernel(model, points[j] - points[m], fields::Which::Majorant);
      }
      value *= ipow(factor, c);
    }
  }
  return value;
}

cplx monomial_inner(int k, const fields::GaussianSpec& f, const fields::GaussianSpec& g,
                    fields::Which which, const fields::TwoPointModel& model) {
  if (k < 0) throw std::invalid_argument("monomial_inner: k must be >= 0");
  diagram::Options opts;
  opts.cross_kernel = which;
  PairingMultiIndex K(2);
  K.at(0, 1) = k;
  const fields::GaussianSpec bra[] = {f};
  const fields::GaussianSpec ket[] = {g};
  const cplx integral = diagram::contracted_integral(model, bra, ket, K, opts);
  return std::exp(num::log_factorial(k)) * integral;
}

}  // namespace wickconv::wick
