#include "wickconv/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wickconv/numerics.hpp"

namespace wickconv::convergence {

namespace {

using fields::cplx;

constexpr double kSlopeHold = 0.02;
constexpr double kSlopeFail = 0.2;

// verdict from per-point margins: bounded means not growing across the last
// decade of the grid
void finish_verdict(CriterionVerdict& v) {
  double sup = num::kNegInf;
  bool any_divergent = false;
  for (const auto& row : v.rows) {
    if (row.flag == "divergent") any_divergent = true;
    if (row.margin > sup) {
      sup = row.margin;
      v.worst_point = row.x;
    }
    if (row.flag == "truncated") v.truncated = true;
    if (row.flag == "bracket") v.bracket_edge = true;
  }
  v.log_C = sup;
  if (any_divergent) {
    v.holds = false;
    v.inconclusive = false;
    return;
  }
  const double x_max = v.rows.back().x;
  std::vector<double> lx, my;
  for (const auto& row : v.rows) {
    if (row.x >= 0.1 * x_max && std::isfinite(row.margin)) {
      lx.push_back(std::log(row.x));
      my.push_back(row.margin);
    }
  }
  if (lx.size() < 3) {
    v.holds = std::isfinite(sup);
    v.inconclusive = !v.holds;
    return;
  }
  // normalize the slope by the margin scale so the verdict does not depend on
  // the criterion's overall normalization
  const auto fit = num::fit_line(lx, my);
  double scale = 1.0;
  for (double m : my) scale = std::max(scale, std::abs(m) / (1.0 + std::abs(lx.back())));
  v.trend_slope = fit.slope / scale;
  if (v.trend_slope > kSlopeFail) {
    v.holds = false;
  } else if (v.trend_slope < kSlopeHold) {
    v.holds = true;
  } else {
    v.holds = false;
    v.inconclusive = true;
  }
}

double indicator_log(const weights::WeightSequence& seq, double r, bool& truncated) {
  const auto res = weights::indicator(seq, r);
  if (res.truncated) truncated = true;
  return res.log_value;
}

}  // namespace

Conditions13Report check_conditions_13(const wick::CoefficientSequence& d, int k_max) {
  if (k_max < 8) throw std::invalid_argument("check_conditions_13: need k_max >= 8");
  Conditions13Report rep;

  // (i) (k! |d_{2k}|)^{1/k} -> 0
  std::vector<double> lk;
  for (int k = 1; k <= k_max; ++k) {
    if (2 * k > d.table_max()) break;
    const double la = d.log_abs(2 * k);
    if (la == num::kNegInf) continue;
    lk.push_back((num::log_factorial(k) + la) / k);
  }
  if (lk.size() < 8) {
    rep.vacuous = true;
    rep.decay_ok = true;
  } else {
    const std::size_t q = lk.size() / 4;
    double first_min = num::kInf, last_max = num::kNegInf;
    for (std::size_t i = 0; i < q; ++i) first_min = std::min(first_min, lk[i]);
    for (std::size_t i = lk.size() - q; i < lk.size(); ++i) last_max = std::max(last_max, lk[i]);
    rep.first_quartile_min = first_min;
    rep.last_quartile_max = last_max;
    rep.decay_ok = last_max < first_min && last_max < lk.front() + std::log(1e-2);
  }

  // (ii) |d_{k+l}| <= C h^{k+l} |d_k| |d_l| on the range, minimal h on a grid
  const int range = static_cast<int>(std::min<std::int64_t>(k_max, d.table_max()));
  std::vector<double> V(static_cast<std::size_t>(range) + 1, num::kNegInf);
  for (int s = 0; s <= range; ++s) {
    const double ls = d.log_abs(s);
    if (ls == num::kNegInf) continue;
    double best = num::kNegInf;
    for (int k = 0; k <= s; ++k) {
      const double lk1 = d.log_abs(k);
      const double lk2 = d.log_abs(s - k);
      if (lk1 == num::kNegInf || lk2 == num::kNegInf) continue;
      best = std::max(best, ls - lk1 - lk2);
    }
    V[static_cast<std::size_t>(s)] = best;
  }
  const int hpoints = 121;
  for (int i = 0; i < hpoints; ++i) {
    const double h = std::exp(std::log(16.0) * i / (hpoints - 1));
    double logC = 0.0;
    for (int s = 0; s <= range; ++s)
      if (V[static_cast<std::size_t>(s)] != num::kNegInf)
        logC = std::max(logC, V[static_cast<std::size_t>(s)] - s * std::log(h));
    if (logC <= std::log(1e12)) {
      rep.submult_ok = true;
      rep.submult_h = h;
      rep.submult_C = std::exp(logC);
      break;
    }
  }
  return rep;
}

SeriesValue series_S(double L, const wick::CoefficientSequence& d, double x, int k_max) {
  if (!(L > 0.0)) throw std::invalid_argument("series_S: L must be > 0");
  if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("series_S: x must be finite, >= 0");
  SeriesValue out;
  if (x == 0.0) {
    out.log_value = d.log_abs(0);
    return out;
  }
  std::vector<double> finite;
  finite.reserve(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    if (2 * k > d.table_max()) break;
    const double la = d.log_abs(2 * k);
    if (la == num::kNegInf) continue;
    finite.push_back(k * std::log(L) + num::log_factorial(k) + la + k * std::log(x));
  }
  if (finite.empty()) {
    out.log_value = num::kNegInf;
    return out;
  }
  if (finite.size() >= 3 && finite[finite.size() - 1] > finite[finite.size() - 2] &&
      finite[finite.size() - 2] > finite[finite.size() - 3]) {
    out.divergent = true;
    return out;
  }
  out.log_value = num::log_sum_exp(finite);
  if (finite.back() > out.log_value + std::log(1e-12)) out.truncated = true;
  return out;
}

CriterionVerdict check_ir(const wick::CoefficientSequence& d,
                          const std::function<double(double)>& w_ir,
                          const weights::WeightSequence& a, double L, double eps,
                          std::span<const double> r_grid, par::Exec exec) {
  if (r_grid.empty()) throw std::invalid_argument("check_ir: empty grid");
  CriterionVerdict v;
  v.condition_id = "theorem2-ir";
  v.rows.resize(r_grid.size());
  par::map_indexed(exec, r_grid.size(), [&](std::size_t i) {
    const double r = r_grid[i];
    GridRow row;
    row.x = r;
    const SeriesValue s = series_S(L, d, w_ir(r));
    bool trunc = false;
    row.rhs_log = indicator_log(a, eps * r, trunc);
    if (s.divergent) {
      row.flag = "divergent";
      row.lhs_log = num::kInf;
      row.margin = num::kInf;
    } else {
      row.lhs_log = s.log_value;
      row.margin = row.lhs_log - row.rhs_log;
      if (s.truncated || trunc) row.flag = "truncated";
    }
    return row;
  }, v.rows.data());
  finish_verdict(v);
  return v;
}

CriterionVerdict check_uv(const wick::CoefficientSequence& d,
                          const std::function<double(double)>& w_uv,
                          const weights::WeightSequence& b, double L, double eps,
                          std::span<const double> s_grid, double t_min, double t_max,
                          par::Exec exec) {
  if (s_grid.empty()) throw std::invalid_argument("check_uv: empty grid");
  CriterionVerdict v;
  v.condition_id = "theorem2-uv";
  v.rows.resize(s_grid.size());
  par::map_indexed(exec, s_grid.size(), [&](std::size_t i) {
    const double sv = s_grid[i];
    GridRow row;
    row.x = sv;
    bool divergent = false, truncated = false;
    auto objective = [&](double t) {
      const SeriesValue val = series_S(L, d, w_uv(t));
      if (val.divergent) {
        divergent = true;
        return num::kInf;
      }
      if (val.truncated) truncated = true;
      return sv * t + val.log_value;
    };
    const auto m = num::log_grid_min(objective, t_min, t_max, 64, 1e-10);
    bool trunc_b = false;
    row.rhs_log = indicator_log(b, eps * sv, trunc_b);
    if (divergent) {
      row.flag = "divergent";
      row.lhs_log = num::kInf;
      row.margin = num::kInf;
    } else {
      row.lhs_log = m.f;
      row.margin = row.lhs_log - row.rhs_log;
      if (m.edge)
        row.flag = "bracket";
      else if (truncated || trunc_b)
        row.flag = "truncated";
    }
    return row;
  }, v.rows.data());
  finish_verdict(v);
  return v;
}

ExpCaseResult check_exp_case(double g, const fields::IRUVProfile& profile,
                             const weights::WeightSequence& a, const weights::WeightSequence& b,
                             std::span<const double> L_list, std::span<const double> r_grid,
                             std::span<const double> s_grid, par::Exec exec) {
  ExpCaseResult out;
  for (double L : L_list) {
    const double leff = L * g * g;
    // IR: exp{L w_IR(r)} <= C a(r)
    CriterionVerdict vir;
    vir.condition_id = "exp-case-ir";
    vir.rows.resize(r_grid.size());
    par::map_indexed(exec, r_grid.size(), [&](std::size_t i) {
      GridRow row;
      row.x = r_grid[i];
      row.lhs_log = leff * profile.w_ir(r_grid[i]);
      bool trunc = false;
      row.rhs_log = indicator_log(a, r_grid[i], trunc);
      row.margin = row.lhs_log - row.rhs_log;
      if (trunc) row.flag = "truncated";
      return row;
    }, vir.rows.data());
    finish_verdict(vir);

    // UV: inf_t exp{s t + L w_UV(t)} <= C b(s)
    CriterionVerdict vuv;
    vuv.condition_id = "exp-case-uv";
    vuv.rows.resize(s_grid.size());
    par::map_indexed(exec, s_grid.size(), [&](std::size_t i) {
      GridRow row;
      row.x = s_grid[i];
      auto objective = [&](double t) { return s_grid[i] * t + leff * profile.w_uv(t); };
      const auto m = num::log_grid_min(objective, 1e-8, 1e4, 64, 1e-10);
      row.lhs_log = m.f;
      bool trunc = false;
      row.rhs_log = indicator_log(b, s_grid[i], trunc);
      row.margin = row.lhs_log - row.rhs_log;
      if (m.edge)
        row.flag = "bracket";
      else if (trunc)
        row.flag = "truncated";
      return row;
    }, vuv.rows.data());
    finish_verdict(vuv);

    out.L_values.push_back(L);
    out.ir.push_back(std::move(vir));
    out.uv.push_back(std::move(vuv));
  }
  for (std::size_t i = 0; i < out.L_values.size(); ++i)
    if (out.ir[i].holds && out.uv[i].holds)
      out.largest_passing_L = out.largest_passing_L
                                  ? std::max(*out.largest_passing_L, out.L_values[i])
                                  : out.L_values[i];
  return out;
}

namespace {

SpaceSideResult bisect_gamma(const std::function<bool(double)>& passes, double lo, double hi) {
  SpaceSideResult out;
  if (!passes(lo)) {
    out.out_of_family = true;
    out.gamma = lo;
    out.bracket_lo = lo;
    out.bracket_hi = lo;
    return out;
  }
  if (passes(hi)) {
    out.unconstrained = true;
    out.gamma = lo;  // every exponent works; report the range minimum
    out.bracket_lo = hi;
    out.bracket_hi = hi;
    return out;
  }
  double a = lo, b = hi;
  while (b - a > 0.02) {
    const double mid = 0.5 * (a + b);
    if (passes(mid))
      a = mid;
    else
      b = mid;
  }
  out.gamma = 0.5 * (a + b);
  out.bracket_lo = a;
  out.bracket_hi = b;
  return out;
}

}  // namespace

SpaceRecommendation recommend_space(const wick::CoefficientSequence& d,
                                    const fields::IRUVProfile& profile,
                                    std::span<const double> r_grid,
                                    std::span<const double> s_grid, double L, double gamma_lo,
                                    double gamma_hi, par::Exec exec) {
  // finite-support coefficients give finite sums: every space passes
  if (d.finite_support()) {
    SpaceRecommendation rec;
    rec.ir.unconstrained = true;
    rec.ir.gamma = gamma_lo;
    rec.ir.bracket_lo = rec.ir.bracket_hi = gamma_hi;
    rec.uv = rec.ir;
    return rec;
  }
  const double g = d.kind() == wick::CoefficientSequence::Kind::Exponential ? d.coupling() : 1.0;
  const double L_list[] = {L};
  SpaceRecommendation rec;
  rec.ir = bisect_gamma(
      [&](double gamma) {
        const auto a = weights::WeightSequence::power(gamma);
        const auto res = check_exp_case(g, profile, a, a, L_list, r_grid, s_grid, exec);
        return res.ir.front().holds;
      },
      gamma_lo, gamma_hi);
  rec.uv = bisect_gamma(
      [&](double gamma) {
        const auto b = weights::WeightSequence::power(gamma);
        const auto res = check_exp_case(g, profile, b, b, L_list, r_grid, s_grid, exec);
        return res.uv.front().holds;
      },
      gamma_lo, gamma_hi);
  return rec;
}

Theorem1Report theorem1_diagnostic(const fields::TwoPointModel& model,
                                   const wick::CoefficientSequence& d,
                                   const weights::WeightSequence& a,
                                   const weights::WeightSequence& b, const Theorem1Params& params,
                                   par::Exec exec) {
  if (!model.has_evaluator()) throw std::logic_error("theorem1_diagnostic: model not evaluable");
  if (params.s_grid.empty()) throw std::invalid_argument("theorem1_diagnostic: empty s grid");
  if (params.k_max > 30) throw std::invalid_argument("theorem1_diagnostic: k_max > 30");
  if (!fields::imag_in_open_cone(params.eta, fields::Tube::Forward))
    throw std::invalid_argument("theorem1_diagnostic: eta must be forward timelike");

  Theorem1Report rep;
  const int np = params.x_points;
  const int nt = params.t_points;
  const double X = params.x_extent;
  const double cell = (2.0 * X / np) * (2.0 * X / np);

  std::vector<double> t_grid(static_cast<std::size_t>(nt));
  for (int it = 0; it < nt; ++it)
    t_grid[static_cast<std::size_t>(it)] =
        params.delta * std::exp(std::log(1e-4) * (nt - 1 - it) / (nt - 1));

  // ln |w_mu(x - i t eta)| on the (t, x) grid, and the indicator penalty
  std::vector<double> lnw(static_cast<std::size_t>(nt) * np * np);
  std::vector<double> lna(static_cast<std::size_t>(np) * np);
  bool trunc = false;
  for (int ix = 0; ix < np; ++ix)
    for (int iy = 0; iy < np; ++iy) {
      const double x0 = -X + (2.0 * X) * (ix + 0.5) / np;
      const double x1 = -X + (2.0 * X) * (iy + 0.5) / np;
      const double r = std::sqrt(x0 * x0 + x1 * x1);
      lna[static_cast<std::size_t>(ix) * np + iy] = indicator_log(a, r / params.A, trunc);
    }
  par::map_indexed(exec, static_cast<std::size_t>(nt) * np * np, [&](std::size_t idx) {
    const int it = static_cast<int>(idx / (static_cast<std::size_t>(np) * np));
    const std::size_t rem = idx % (static_cast<std::size_t>(np) * np);
    const int ix = static_cast<int>(rem / np);
    const int iy = static_cast<int>(rem % np);
    const double x0 = -X + (2.0 * X) * (ix + 0.5) / np;
    const double x1 = -X + (2.0 * X) * (iy + 0.5) / np;
    const double t = t_grid[static_cast<std::size_t>(it)];
    const fields::CVec2 zeta{cplx(x0, -t * params.eta.t), cplx(x1, -t * params.eta.x)};
    return std::log(std::abs(fields::eval_kernel(model, zeta, fields::Which::Majorant)));
  }, lnw.data());

  // ln I_k(t) = ln sum_x cell exp(k lnw - lna)
  auto log_ik = [&](int k, int it) {
    const std::size_t base = static_cast<std::size_t>(it) * np * np;
    double mx = num::kNegInf;
    for (std::size_t i = 0; i < static_cast<std::size_t>(np) * np; ++i)
      mx = std::max(mx, k * lnw[base + i] - lna[i]);
    num::Kahan acc;
    double tail = 0.0;
    for (int ix = 0; ix < np; ++ix)
      for (int iy = 0; iy < np; ++iy) {
        const std::size_t i = static_cast<std::size_t>(ix) * np + iy;
        const double v = std::exp(k * lnw[base + i] - lna[i] - mx);
        acc.add(v);
        if (ix == 0 || iy == 0 || ix == np - 1 || iy == np - 1) tail += v;
      }
    rep.tail_fraction = std::max(rep.tail_fraction, tail / acc.sum);
    return mx + std::log(acc.sum * cell);
  };

  std::vector<std::vector<double>> log_ik_table(static_cast<std::size_t>(params.k_max) + 1,
                                                std::vector<double>(static_cast<std::size_t>(nt)));
  for (int k = 0; k <= params.k_max; ++k)
    for (int it = 0; it < nt; ++it)
      log_ik_table[static_cast<std::size_t>(k)][static_cast<std::size_t>(it)] = log_ik(k, it);

  // per s: ln sum_k inf_t e^{st} D_k I_k(t), D_k = k! |d_k|^2
  const double s_mid = params.s_grid[params.s_grid.size() / 2];
  rep.term_logs.assign(static_cast<std::size_t>(params.k_max) + 1, num::kNegInf);
  rep.rows.resize(params.s_grid.size());
  for (std::size_t is = 0; is < params.s_grid.size(); ++is) {
    const double s = params.s_grid[is];
    std::vector<double> terms;
    for (int k = 0; k <= params.k_max; ++k) {
      const double la = d.log_abs(k);
      if (la == num::kNegInf) continue;
      const double log_dk = num::log_factorial(k) + 2.0 * la;
      double best = num::kInf;
      int best_it = 0;
      for (int it = 0; it < nt; ++it) {
        const double v = s * t_grid[static_cast<std::size_t>(it)] + log_dk +
                         log_ik_table[static_cast<std::size_t>(k)][static_cast<std::size_t>(it)];
        if (v < best) {
          best = v;
          best_it = it;
        }
      }
      if (best_it == 0 || best_it == nt - 1) rep.t_edge = true;
      terms.push_back(best);
      if (s == s_mid) rep.term_logs[static_cast<std::size_t>(k)] = best;
    }
    GridRow row;
    row.x = s;
    row.lhs_log = num::log_sum_exp(terms);
    bool tr = false;
    row.rhs_log = indicator_log(b, params.eps * s, tr);
    row.margin = row.lhs_log - row.rhs_log;
    rep.rows[is] = row;
  }
  rep.truncated = trunc;

  CriterionVerdict v;
  v.rows = rep.rows;
  finish_verdict(v);
  rep.bounded = v.holds;

  std::vector<double> fin;
  for (double t : rep.term_logs)
    if (t != num::kNegInf) fin.push_back(t);
  rep.cauchy = fin.size() >= 3 && fin[fin.size() - 1] < fin[fin.size() - 2] &&
               fin[fin.size() - 1] < fin.front() + std::log(1e-10);
  return rep;
}

}  // namespace wickconv::convergence
