#pragma once

#include <complex>
#include <map>
#include <span>
#include <vector>

#include "wickconv/parallel.hpp"
#include "wickconv/wick.hpp"

namespace wickconv::diagram {

using cplx = std::complex<double>;

struct Options {
  double stagger = 0.5;    // contour offset step along the time axis
  double rel_tol = 1e-10;  // adaptive tolerance (2-vertex path)
  int hermite_nodes = 10;  // tensor nodes per dimension (4-vertex path)
  fields::Which cross_kernel = fields::Which::Majorant;
  par::Exec exec = par::Exec::Parallel;
};

// Integral over the 2n vertex positions of the W^K kernel-power product
// against the Gaussian pair (bra side conjugated), evaluated on staggered
// contours inside the analyticity tube. Vertices 0..n-1 are the bra side.
// n = 1 uses adaptive 2-D quadrature; n = 2 a deterministic tensor rule.
cplx contracted_integral(const fields::TwoPointModel& model,
                         std::span<const fields::GaussianSpec> bra,
                         std::span<const fields::GaussianSpec> ket,
                         const wick::PairingMultiIndex& K, const Options& opts = {});

// Shared evaluator with memoization; the 4-vertex path computes all requested
// multi-indices in one node sweep.
class KernelIntegralCache {
 public:
  KernelIntegralCache(const fields::TwoPointModel& model,
                      std::vector<fields::GaussianSpec> bra,
                      std::vector<fields::GaussianSpec> ket, Options opts);

  void precompute(std::span<const wick::PairingMultiIndex> ks);
  cplx value(const wick::PairingMultiIndex& K);
  std::size_t size() const { return cache_.size(); }

 private:
  const fields::TwoPointModel& model_;
  std::vector<fields::GaussianSpec> bra_, ket_;
  Options opts_;
  std::map<std::vector<int>, cplx> cache_;
};

// Pattern coefficient maps for the norm of the truncated state
// sum_{profiles p, |p| <= cap} prod_j d_{p_j} :phi^{p_j}:(f_j) Psi0.
// Both routes must agree exactly; that equality is the series regrouping.
std::map<wick::PairingMultiIndex, wick::BigInt> norm_patterns_by_recursion(int n, int cap);
std::map<wick::PairingMultiIndex, wick::BigInt> norm_patterns_by_multiindex(int n, int cap);

// Norm value from a pattern map: sum_K coeff(K) prod_j |d_{kappa_j}| I(K).
cplx norm_sq_from_patterns(const std::map<wick::PairingMultiIndex, wick::BigInt>& patterns,
                           const wick::CoefficientSequence& d, KernelIntegralCache& cache);

}  // namespace wickconv::diagram
