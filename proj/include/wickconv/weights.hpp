#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "wickconv/numerics.hpp"

namespace wickconv::weights {

// Defining sequence a_k (or b_l) of a generalized type-S space. Families are
// evaluated in the log domain on demand; tables carry explicit values.
class WeightSequence {
 public:
  enum class Kind { Power, FactorialPower, Table };

  static WeightSequence power(double gamma);             // a_k = k^{gamma k}, a_0 = 1
  static WeightSequence factorial_power(double gamma);   // a_k = (k!)^gamma
  static WeightSequence table(const std::vector<double>& values);
  static WeightSequence table_log(std::vector<double> log_values);

  Kind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  bool is_table() const { return kind_ == Kind::Table; }

  // ln a_k. Table mode throws past the tabulated range.
  double log_at(std::int64_t k) const;
  // Largest valid k for table mode; families have no intrinsic limit.
  std::int64_t table_max() const;

  std::string describe() const;

 private:
  WeightSequence() = default;
  Kind kind_ = Kind::Power;
  double gamma_ = 1.0;
  std::vector<double> log_values_;
};

struct IndicatorResult {
  double log_value = 0.0;   // ln sup_k r^k / a_k
  std::int64_t argmax = 0;
  bool truncated = false;   // sup still rising at the evaluation cap
};

// ln a(r) = ln sup_k r^k/a_k. Families use the ratio test (log-convexity),
// tables use a full scan.
IndicatorResult indicator(const WeightSequence& seq, double r);

// Thread-safe memoized indicator evaluations, keyed by r.
class IndicatorFunction {
 public:
  explicit IndicatorFunction(WeightSequence seq) : seq_(std::move(seq)) {}
  IndicatorResult at(double r) const;
  const WeightSequence& sequence() const { return seq_; }

 private:
  WeightSequence seq_;
  mutable std::mutex mu_;
  mutable std::map<double, IndicatorResult> cache_;
};

// Young-type weight function: nonnegative, increasing, alpha-side convex.
class WeightFunction {
 public:
  enum class Kind { Power, Exponential, Linear, Table };

  WeightFunction() = default;  // linear

  static WeightFunction power(double sigma);  // s^sigma
  static WeightFunction exponential();        // e^s - 1
  static WeightFunction linear();             // s
  // Sampled convex table (s ascending, starting at s=0 with value 0).
  // Rejects non-convex data by a second-difference scan.
  static WeightFunction table(std::vector<double> s, std::vector<double> v);

  double operator()(double s) const;
  double derivative(double s) const;
  Kind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  bool has_closed_conjugate() const;
  num::ExtReal closed_conjugate(double r) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::Linear;
  double sigma_ = 1.0;
  std::vector<double> ts_, tv_;
};

struct YoungWeightPair {
  WeightFunction alpha;
  WeightFunction beta;
  double h = 2.0;  // witness for 2*beta(s) <= beta(h*s)

  struct Validation {
    bool zero_at_origin = true;
    bool increasing = true;
    bool doubling = true;
    double worst_doubling_margin = 0.0;
  };
  Validation validate(double s_max = 1e3, int grid = 200) const;
};

// Convex conjugate alpha_*(r) = sup_{s>0} (r s - alpha(s)). The infinite flag
// reports an unbounded sup (e.g. linear alpha with r > 1).
num::ExtReal legendre(const WeightFunction& alpha, double r);

// Conjugate of a numerically defined convex function, by golden section on an
// expanding bracket. Used for iterated transforms.
num::ExtReal legendre_numeric(const std::function<double(double)>& alpha, double r,
                              double s_cap = 1e12);

// Tabulates a_k = sup_r r^k e^{-alpha_*(r)} and b_l = sup_s s^l e^{-beta(s)}
// for k,l <= k_max. Throws with the offending index if a sup fails to bracket.
std::pair<WeightSequence, WeightSequence> sequences_from_young(const YoungWeightPair& pair,
                                                               std::int64_t k_max);

struct SubmultWitness {
  bool ok = false;
  double C = 0.0;
  double h = 0.0;
};

struct GsReport {
  bool log_convex = true;
  std::int64_t first_violation = -1;
  SubmultWitness submult;
};

// Checks log-convexity exactly in the log domain and searches the smallest h
// on a geometric grid in [1, 16] whose induced C stays under c_cap.
GsReport validate_gs(const WeightSequence& seq, std::int64_t k_max, double c_cap = 1e12);

}  // namespace wickconv::weights
