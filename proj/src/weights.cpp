#include "wickconv/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wickconv::weights {

namespace {
constexpr std::int64_t kFamilyCap = std::int64_t{1} << 40;
}

WeightSequence WeightSequence::power(double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("WeightSequence::power: gamma must be >= 0");
  WeightSequence s;
  s.kind_ = Kind::Power;
  s.gamma_ = gamma;
  return s;
}

WeightSequence WeightSequence::factorial_power(double gamma) {
  if (!(gamma >= 0.0))
    throw std::invalid_argument("WeightSequence::factorial_power: gamma must be >= 0");
  WeightSequence s;
  s.kind_ = Kind::FactorialPower;
  s.gamma_ = gamma;
  return s;
}

WeightSequence WeightSequence::table(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("WeightSequence::table: empty table");
  std::vector<double> logs(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0))
      throw std::invalid_argument("WeightSequence::table: entries must be positive");
    logs[i] = std::log(values[i]);
  }
  return table_log(std::move(logs));
}

WeightSequence WeightSequence::table_log(std::vector<double> log_values) {
  if (log_values.empty()) throw std::invalid_argument("WeightSequence::table_log: empty table");
  WeightSequence s;
  s.kind_ = Kind::Table;
  s.log_values_ = std::move(log_values);
  return s;
}

double WeightSequence::log_at(std::int64_t k) const {
  if (k < 0) throw std::invalid_argument("WeightSequence: negative index");
  switch (kind_) {
    case Kind::Power:
      return k == 0 ? 0.0 : gamma_ * static_cast<double>(k) * std::log(static_cast<double>(k));
    case Kind::FactorialPower:
      return gamma_ * num::log_factorial(k);
    case Kind::Table:
      if (k >= static_cast<std::int64_t>(log_values_.size()))
        throw std::out_of_range("WeightSequence: index past table");
      return log_values_[static_cast<std::size_t>(k)];
  }
  return 0.0;
}

std::int64_t WeightSequence::table_max() const {
  return kind_ == Kind::Table ? static_cast<std::int64_t>(log_values_.size()) - 1 : kFamilyCap;
}

std::string WeightSequence::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Power:
      os << "power(gamma=" << gamma_ << ")";
      break;
    case Kind::FactorialPower:
      os << "factorial-power(gamma=" << gamma_ << ")";
      break;
    case Kind::Table:
      os << "table(k_max=" << log_values_.size() - 1 << ")";
      break;
  }
  return os.str();
}

IndicatorResult indicator(const WeightSequence& seq, double r) {
  if (!std::isfinite(r) || r < 0.0) throw std::invalid_argument("indicator: r must be finite, >= 0");
  IndicatorResult out;
  if (r == 0.0) {
    out.log_value = -seq.log_at(0);
    out.argmax = 0;
    return out;
  }
  const double lr = std::log(r);
  auto g = [&](std::int64_t k) { return static_cast<double>(k) * lr - seq.log_at(k); };

  if (seq.is_table()) {
    const std::int64_t kmax = seq.table_max();
    std::int64_t arg = 0;
    double best = g(0);
    for (std::int64_t k = 1; k <= kmax; ++k) {
      const double v = g(k);
      if (v > best) {
        best = v;
        arg = k;
      }
    }
    out.log_value = best;
    out.argmax = arg;
    out.truncated = (arg == kmax && kmax >= 1 && g(kmax) >= g(kmax - 1));
    return out;
  }

  // Families are log-convex, so g is concave: climb by the ratio test
  // (continue while ln a_{k+1} - ln a_k <= ln r), doubling then bisecting.
  // Ties resolve to the larger k; the epsilon absorbs last-ulp noise in exact
  // ties such as a_k = k! at r = 10.
  const double tie = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(lr));
  auto diff = [&](std::int64_t k) { return seq.log_at(k + 1) - seq.log_at(k) - tie; };
  std::int64_t hi = 1;
  while (hi < kFamilyCap && diff(hi) <= lr) hi *= 2;
  if (hi >= kFamilyCap) {
    // the peak sits beyond the integer range; use the continuous stationary
    // point, where the integer gap is negligible
    const double gamma = seq.gamma();
    if (gamma == 0.0) {
      out.log_value = num::kInf;  // a_k = 1 and r > 1: sup r^k is unbounded
      out.argmax = std::numeric_limits<std::int64_t>::max();
      return out;
    }
    double kstar;
    if (seq.kind() == WeightSequence::Kind::Power) {
      // d/dk (k ln r - gamma k ln k) = 0  =>  k* = e^{ln r / gamma - 1}
      kstar = std::exp(lr / gamma - 1.0);
      out.log_value = gamma * kstar;
    } else {
      // d/dk (k ln r - gamma ln k!) = 0  =>  ln r = gamma psi(k+1) ~ gamma ln k
      kstar = std::exp(lr / gamma);
      out.log_value = kstar * lr - gamma * std::lgamma(kstar + 1.0);
    }
    out.argmax = kstar < 9e18 ? static_cast<std::int64_t>(kstar)
                              : std::numeric_limits<std::int64_t>::max();
    return out;
  }
  std::int64_t lo = hi / 2;
  if (diff(0) > lr) lo = 0, hi = 0;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (diff(mid) <= lr)
      lo = mid;
    else
      hi = mid;
  }
  // first index whose forward difference exceeds ln r is the argmax
  out.argmax = hi;
  out.log_value = g(hi);
  return out;
}

IndicatorResult IndicatorFunction::at(double r) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(r);
    if (it != cache_.end()) return it->second;
  }
  const IndicatorResult res = indicator(seq_, r);
  std::lock_guard<std::mutex> lock(mu_);
  cache_.emplace(r, res);
  return res;
}

WeightFunction WeightFunction::power(double sigma) {
  if (!(sigma >= 1.0)) throw std::invalid_argument("WeightFunction::power: sigma must be >= 1");
  WeightFunction f;
  f.kind_ = Kind::Power;
  f.sigma_ = sigma;
  return f;
}

WeightFunction WeightFunction::exponential() {
  WeightFunction f;
  f.kind_ = Kind::Exponential;
  return f;
}

WeightFunction WeightFunction::linear() {
  WeightFunction f;
  f.kind_ = Kind::Linear;
  return f;
}

WeightFunction WeightFunction::table(std::vector<double> s, std::vector<double> v) {
  if (s.size() != v.size() || s.size() < 3)
    throw std::invalid_argument("WeightFunction::table: need >= 3 matching samples");
  if (s.front() != 0.0 || v.front() != 0.0)
    throw std::invalid_argument("WeightFunction::table: first sample must be (0, 0)");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!(s[i] > s[i - 1])) throw std::invalid_argument("WeightFunction::table: s not ascending");
  // second-difference scan on the secant slopes
  for (std::size_t i = 2; i < s.size(); ++i) {
    const double sl_prev = (v[i - 1] - v[i - 2]) / (s[i - 1] - s[i - 2]);
    const double sl_cur = (v[i] - v[i - 1]) / (s[i] - s[i - 1]);
    const double scale = std::max({1.0, std::abs(sl_prev), std::abs(sl_cur)});
    if (sl_cur < sl_prev - 1e-12 * scale)
      throw std::invalid_argument("WeightFunction::table: non-convex table rejected");
  }
  WeightFunction f;
  f.kind_ = Kind::Table;
  f.ts_ = std::move(s);
  f.tv_ = std::move(v);
  return f;
}

double WeightFunction::operator()(double s) const {
  if (!(s >= 0.0)) throw std::invalid_argument("WeightFunction: s must be >= 0");
  switch (kind_) {
    case Kind::Power:
      return std::pow(s, sigma_);
    case Kind::Exponential:
      return std::expm1(s);
    case Kind::Linear:
      return s;
    case Kind::Table: {
      if (s >= ts_.back()) {
        // extend by the last secant
        const std::size_t n = ts_.size();
        const double sl = (tv_[n - 1] - tv_[n - 2]) / (ts_[n - 1] - ts_[n - 2]);
        return tv_[n - 1] + sl * (s - ts_[n - 1]);
      }
      const auto it = std::upper_bound(ts_.begin(), ts_.end(), s);
      const std::size_t i = static_cast<std::size_t>(it - ts_.begin());
      if (i == 0) return tv_[0];
      const double t = (s - ts_[i - 1]) / (ts_[i] - ts_[i - 1]);
      return tv_[i - 1] + t * (tv_[i] - tv_[i - 1]);
    }
  }
  return 0.0;
}

double WeightFunction::derivative(double s) const {
  switch (kind_) {
    case Kind::Power:
      return sigma_ * std::pow(s, sigma_ - 1.0);
    case Kind::Exponential:
      return std::exp(s);
    case Kind::Linear:
      return 1.0;
    case Kind::Table: {
      const double h = 1e-6 * (1.0 + s);
      return ((*this)(s + h) - (*this)(std::max(0.0, s - h))) / (s - h < 0 ? s + h : 2 * h);
    }
  }
  return 0.0;
}

bool WeightFunction::has_closed_conjugate() const { return kind_ != Kind::Table; }

num::ExtReal WeightFunction::closed_conjugate(double r) const {
  num::ExtReal out;
  switch (kind_) {
    case Kind::Power: {
      if (sigma_ == 1.0) {
        if (r > 1.0) {
          out.infinite = true;
          return out;
        }
        out.value = 0.0;
        return out;
      }
      const double sstar = std::pow(r / sigma_, 1.0 / (sigma_ - 1.0));
      out.value = r * sstar - std::pow(sstar, sigma_);
      return out;
    }
    case Kind::Exponential:
      out.value = r <= 1.0 ? 0.0 : r * std::log(r) - r + 1.0;
      return out;
    case Kind::Linear:
      if (r > 1.0)
        out.infinite = true;
      else
        out.value = 0.0;
      return out;
    case Kind::Table:
      throw std::logic_error("closed_conjugate: table family has none");
  }
  return out;
}

std::string WeightFunction::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Power:
      os << "power(sigma=" << sigma_ << ")";
      break;
    case Kind::Exponential:
      os << "exponential";
      break;
    case Kind::Linear:
      os << "linear";
      break;
    case Kind::Table:
      os << "table(" << ts_.size() << " samples)";
      break;
  }
  return os.str();
}

YoungWeightPair::Validation YoungWeightPair::validate(double s_max, int grid) const {
  Validation v;
  v.zero_at_origin = std::abs(alpha(0.0)) < 1e-14 && std::abs(beta(0.0)) < 1e-14;
  double worst = num::kInf;
  double prev_a = alpha(0.0), prev_b = beta(0.0);
  for (int i = 1; i <= grid; ++i) {
    const double s = s_max * i / grid;
    const double va = alpha(s), vb = beta(s);
    if (va < prev_a || vb < prev_b) v.increasing = false;
    prev_a = va;
    prev_b = vb;
    if (s > 0) {
      const double margin = beta(h * s) - 2.0 * beta(s);
      worst = std::min(worst, margin);
    }
  }
  v.worst_doubling_margin = worst;
  v.doubling = worst >= -1e-10 * (1.0 + std::abs(worst));
  return v;
}

num::ExtReal legendre(const WeightFunction& alpha, double r) {
  if (!std::isfinite(r) || r < 0.0) throw std::invalid_argument("legendre: r must be finite, >= 0");
  num::ExtReal out;
  if (alpha.kind() == WeightFunction::Kind::Table) {
    // golden-section on the sampled range; a sup still rising at the edge is
    // reported as unbounded
    const double s_hi = 1e9;
    auto m = [&](double s) { return -(r * s - alpha(s)); };
    const auto res = num::golden_min(m, 0.0, s_hi, 1e-12);
    const double probe = r * s_hi - alpha(s_hi);
    if (probe > -res.f) {
      out.infinite = true;
      return out;
    }
    out.value = -res.f;
    return out;
  }
  // derivative bisection: alpha' is increasing; the sup is unbounded when
  // alpha'(s) stays below r
  if (r == 0.0) {
    out.value = 0.0;
    return out;
  }
  double hi = 1.0;
  int rounds = 0;
  while (alpha.derivative(hi) < r && rounds++ < 80) hi *= 2.0;
  if (alpha.derivative(hi) < r) {
    out.infinite = true;
    return out;
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (alpha.derivative(mid) < r)
      lo = mid;
    else
      hi = mid;
  }
  const double sstar = 0.5 * (lo + hi);
  out.value = std::max(0.0, r * sstar - alpha(sstar));
  return out;
}

num::ExtReal legendre_numeric(const std::function<double(double)>& alpha, double r, double s_cap) {
  num::ExtReal out;
  auto m = [&](double s) { return r * s - alpha(s); };
  // expand until the maximand turns over
  double hi = 1.0;
  double best_edge = m(0.0);
  while (hi < s_cap) {
    if (m(hi) < best_edge && m(hi) < m(hi * 0.5)) break;
    best_edge = std::max(best_edge, m(hi));
    hi *= 2.0;
  }
  if (hi >= s_cap) {
    out.infinite = true;
    return out;
  }
  const auto res = num::golden_min([&](double s) { return -m(s); }, 0.0, hi, 1e-13);
  out.value = std::max(m(0.0), -res.f);
  return out;
}

std::pair<WeightSequence, WeightSequence> sequences_from_young(const YoungWeightPair& pair,
                                                               std::int64_t k_max) {
  if (k_max < 1) throw std::invalid_argument("sequences_from_young: k_max must be >= 1");
  auto conj = [&](double r) -> double {
    const num::ExtReal v = pair.alpha.has_closed_conjugate() ? pair.alpha.closed_conjugate(r)
                                                             : legendre(pair.alpha, r);
    return v.infinite ? num::kInf : v.value;
  };

  std::vector<double> la(static_cast<std::size_t>(k_max) + 1);
  std::vector<double> lb(static_cast<std::size_t>(k_max) + 1);
  la[0] = 0.0;  // a_0 = b_0 = 1 by convention
  lb[0] = 0.0;

  auto sup_log = [&](std::int64_t k, const std::function<double(double)>& penalty,
                     const char* side) {
    // maximize k*u - penalty(e^u) over u = ln r
    auto neg = [&](double u) { return -(static_cast<double>(k) * u - penalty(std::exp(u))); };
    double u_hi = 1.0;
    int rounds = 0;
    while (rounds++ < 200 && neg(u_hi + 1.0) < neg(u_hi)) u_hi += std::max(1.0, u_hi * 0.5);
    if (rounds >= 200) {
      std::ostringstream os;
      os << "sequences_from_young: sup for " << side << " index " << k
         << " failed to bracket (weight not indefinitely increasing?)";
      throw std::runtime_error(os.str());
    }
    const auto res = num::golden_min(neg, -40.0, u_hi + 2.0, 1e-12);
    return -res.f;
  };

  for (std::int64_t k = 1; k <= k_max; ++k) {
    la[static_cast<std::size_t>(k)] = sup_log(k, conj, "a");
    lb[static_cast<std::size_t>(k)] =
        sup_log(k, [&](double s) { return pair.beta(s); }, "b");
  }
  return {WeightSequence::table_log(std::move(la)), WeightSequence::table_log(std::move(lb))};
}

GsReport validate_gs(const WeightSequence& seq, std::int64_t k_max, double c_cap) {
  if (k_max < 2) throw std::invalid_argument("validate_gs: k_max must be >= 2");
  k_max = std::min(k_max, seq.table_max());
  const std::size_t n = static_cast<std::size_t>(k_max) + 1;
  std::vector<double> L(n);
  for (std::size_t k = 0; k < n; ++k) L[k] = seq.log_at(static_cast<std::int64_t>(k));

  GsReport rep;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double lhs = 2.0 * L[k];
    const double rhs = L[k - 1] + L[k + 1];
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    if (lhs > rhs + 1e-12 * scale) {
      rep.log_convex = false;
      rep.first_violation = static_cast<std::int64_t>(k);
      break;
    }
  }

  // V_s = max_{k+l=s} [L_s - L_k - L_l]; then ln C(h) = max_s (V_s - s ln h)
  std::vector<double> V(n, num::kNegInf);
  for (std::size_t s = 0; s < n; ++s) {
    double best = num::kNegInf;
    for (std::size_t k = 0; k <= s; ++k) best = std::max(best, L[s] - L[k] - L[s - k]);
    V[s] = best;
  }
  const int hpoints = 121;
  for (int i = 0; i < hpoints; ++i) {
    const double h = std::exp(std::log(16.0) * i / (hpoints - 1));
    double logC = num::kNegInf;
    for (std::size_t s = 0; s < n; ++s) logC = std::max(logC, V[s] - static_cast<double>(s) * std::log(h));
    logC = std::max(logC, 0.0);  // C >= 1 so the k=l=0 case holds
    if (logC <= std::log(c_cap)) {
      rep.submult.ok = true;
      rep.submult.h = h;
      rep.submult.C = std::exp(logC);
      break;
    }
  }
  return rep;
}

}  // namespace wickconv::weights
