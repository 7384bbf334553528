#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace wickconv::num {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Kahan compensated accumulator.
struct Kahan {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

// log(sum_i exp(a[i])) with compensated summation. -inf entries are skipped;
// returns -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> a);

// Extended real used where +inf is an answer, not an error.
struct ExtReal {
  double value = 0.0;  // meaningful only when !infinite
  bool infinite = false;
};

// Golden-section minimum of f on [a, b]; f must be unimodal there.
struct MinResult {
  double x = 0.0;
  double f = 0.0;
  int evals = 0;
};
MinResult golden_min(const std::function<double(double)>& f, double a, double b,
                     double xtol = 1e-12, int max_iter = 200);

// Scans f on a log-spaced grid over [lo, hi], then golden-refines around the
// best bracket. Returns the refined minimum plus a flag when the grid minimum
// sits on an edge (no interior bracket).
struct GridMinResult {
  double x = 0.0;
  double f = 0.0;
  bool edge = false;
};
GridMinResult log_grid_min(const std::function<double(double)>& f, double lo, double hi,
                           int grid_points = 64, double xtol_log = 1e-10);

// argmax of a concave integer sequence g(k) on [lo, hi] by ternary search.
std::int64_t concave_argmax(const std::function<double(std::int64_t)>& g, std::int64_t lo,
                            std::int64_t hi);

// Least-squares line fit y ~ intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// log(n!) exactly for small n, lgamma otherwise.
double log_factorial(std::int64_t n);

// Jacobi eigendecomposition of a small dense symmetric matrix (row-major,
// n <= 16). evecs is row-major with eigenvector k in column k.
void sym_eig(int n, const std::vector<double>& a, std::vector<double>& evals,
             std::vector<double>& evecs);

// Gaussian elimination with partial pivoting for small dense systems.
std::vector<double> solve_small(int n, std::vector<double> a, std::vector<double> rhs);

}  // namespace wickconv::num
