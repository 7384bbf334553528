#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wickconv/fields.hpp"
#include "wickconv/parallel.hpp"
#include "wickconv/weights.hpp"
#include "wickconv/wick.hpp"

namespace wickconv::convergence {

// ---------------------------------------------------------------------------
// Coefficient conditions
// ---------------------------------------------------------------------------

struct Conditions13Report {
  bool decay_ok = false;       // (k! |d_{2k}|)^{1/k} -> 0, by quartile trend
  bool vacuous = false;        // finite support: nothing to decay
  double first_quartile_min = 0.0;  // log scale
  double last_quartile_max = 0.0;
  bool submult_ok = false;     // |d_{k+l}| <= C h^{k+l} |d_k| |d_l|
  double submult_C = 0.0;
  double submult_h = 0.0;
};

Conditions13Report check_conditions_13(const wick::CoefficientSequence& d, int k_max);

// ---------------------------------------------------------------------------
// The series S(x) = sum_k L^k k! |d_{2k}| x^k, in the log domain
// ---------------------------------------------------------------------------

struct SeriesValue {
  double log_value = 0.0;
  bool divergent = false;  // terms still growing at the truncation order
  bool truncated = false;  // tail contributes more than 1e-12 of the sum
};

SeriesValue series_S(double L, const wick::CoefficientSequence& d, double x, int k_max = 200);

// ---------------------------------------------------------------------------
// Criterion verdicts
// ---------------------------------------------------------------------------

struct GridRow {
  double x = 0.0;        // r or s
  double lhs_log = 0.0;
  double rhs_log = 0.0;
  double margin = 0.0;   // lhs_log - rhs_log
  std::string flag;      // "", "divergent", "truncated", "bracket"
};

struct CriterionVerdict {
  std::string condition_id;
  bool holds = false;
  bool inconclusive = false;
  double log_C = 0.0;        // sup of the margin over the grid
  double worst_point = 0.0;  // r or s attaining it
  double trend_slope = 0.0;  // margin vs ln(x) over the last decade
  bool truncated = false;
  bool bracket_edge = false;
  std::vector<GridRow> rows;
};

// sup_r [ln S(L, d, w_IR(r)) - ln a(eps r)] bounded with non-growing trend.
CriterionVerdict check_ir(const wick::CoefficientSequence& d,
                          const std::function<double(double)>& w_ir,
                          const weights::WeightSequence& a, double L, double eps,
                          std::span<const double> r_grid,
                          par::Exec exec = par::Exec::Parallel);

// For each s: inf_t [s t + ln S(L, d, w_UV(t))] vs ln b(eps s). The inner
// infimum uses log-grid bracketing plus golden-section refinement.
CriterionVerdict check_uv(const wick::CoefficientSequence& d,
                          const std::function<double(double)>& w_uv,
                          const weights::WeightSequence& b, double L, double eps,
                          std::span<const double> s_grid, double t_min = 1e-8,
                          double t_max = 1e4, par::Exec exec = par::Exec::Parallel);

// ---------------------------------------------------------------------------
// Normal-exponential simplified conditions
// ---------------------------------------------------------------------------

struct ExpCaseResult {
  std::vector<double> L_values;
  std::vector<CriterionVerdict> ir;
  std::vector<CriterionVerdict> uv;
  std::optional<double> largest_passing_L;
};

ExpCaseResult check_exp_case(double g, const fields::IRUVProfile& profile,
                             const weights::WeightSequence& a, const weights::WeightSequence& b,
                             std::span<const double> L_list, std::span<const double> r_grid,
                             std::span<const double> s_grid,
                             par::Exec exec = par::Exec::Parallel);

// ---------------------------------------------------------------------------
// Power-family space recommendation by bisection over the exponent
// ---------------------------------------------------------------------------

struct SpaceSideResult {
  bool unconstrained = false;  // even the largest exponent passes
  bool out_of_family = false;  // even the smallest exponent fails
  double gamma = 0.0;          // boundary estimate (or range edge)
  double bracket_lo = 0.0;     // largest tested passing exponent
  double bracket_hi = 0.0;     // smallest tested failing exponent
};

struct SpaceRecommendation {
  SpaceSideResult ir;
  SpaceSideResult uv;
};

SpaceRecommendation recommend_space(const wick::CoefficientSequence& d,
                                    const fields::IRUVProfile& profile,
                                    std::span<const double> r_grid,
                                    std::span<const double> s_grid, double L = 1.0,
                                    double gamma_lo = 0.05, double gamma_hi = 20.0,
                                    par::Exec exec = par::Exec::Parallel);

// ---------------------------------------------------------------------------
// Theorem 1 numerical diagnostic (n = 1, d = 2)
// ---------------------------------------------------------------------------

struct Theorem1Params {
  double delta = 1.0;   // inner infimum range 0 < t < delta
  double eps = 0.5;
  double A = 1.0;
  fields::Vec2 eta{1.0, 0.0};  // forward timelike direction
  std::vector<double> s_grid;
  double x_extent = 12.0;
  int x_points = 64;
  int t_points = 32;
  int k_max = 20;
};

struct Theorem1Report {
  std::vector<GridRow> rows;       // per s: lhs = ln sum_k inf_t ..., rhs = ln b(eps s)
  std::vector<double> term_logs;   // per k at the median s, after the infimum
  bool bounded = false;            // ratio trend not growing
  bool cauchy = false;             // terms decaying at k_max
  double tail_fraction = 0.0;      // outer-shell share of the x-integral (integrability margin)
  bool t_edge = false;             // infimum hit the t-grid edge somewhere
  bool truncated = false;
};

Theorem1Report theorem1_diagnostic(const fields::TwoPointModel& model,
                                   const wick::CoefficientSequence& d,
                                   const weights::WeightSequence& a,
                                   const weights::WeightSequence& b, const Theorem1Params& params,
                                   par::Exec exec = par::Exec::Parallel);

}  // namespace wickconv::convergence
