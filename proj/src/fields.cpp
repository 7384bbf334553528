#include "wickconv/fields.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "wickconv/bessel.hpp"
#include "wickconv/quadrature.hpp"

namespace wickconv::fields {

cplx minkowski_square(const CVec2& z) { return z.t * z.t - z.x * z.x; }

double euclid_norm(const CVec2& z) {
  return std::sqrt(std::norm(z.t) + std::norm(z.x));
}

bool imag_in_open_cone(Vec2 y, Tube which) {
  if (!(y.t * y.t > y.x * y.x)) return false;
  return which == Tube::Backward ? y.t < 0.0 : y.t > 0.0;
}

TubePoint::TubePoint(cplx z0, cplx z1, Tube which) : z_{z0, z1}, tube_(which) {
  if (!imag_in_open_cone(z_.imag(), which))
    throw std::invalid_argument("TubePoint: imaginary part not in the declared cone");
}

cplx tube_sqrt(const CVec2& zeta) {
  const cplx q = -minkowski_square(zeta);
  const double a = std::arg(q);
  if (std::abs(a) > M_PI - 1e-9)
    throw std::domain_error("tube_sqrt: argument within 1e-9 of the branch cut");
  return std::sqrt(q);
}

double IRUVProfile::w_ir(double r) const {
  switch (ir_kind) {
    case IrKind::Bounded:
      return ir_param;
    case IrKind::Log:
      return std::log1p(r);
    case IrKind::Power:
      return std::pow(r, ir_param);
    case IrKind::Samples: {
      if (r_grid.empty()) return 0.0;
      if (r <= r_grid.front()) return ir_values.front();
      if (r >= r_grid.back()) return ir_values.back();
      const auto it = std::upper_bound(r_grid.begin(), r_grid.end(), r);
      const std::size_t i = static_cast<std::size_t>(it - r_grid.begin());
      const double u = (r - r_grid[i - 1]) / (r_grid[i] - r_grid[i - 1]);
      return ir_values[i - 1] + u * (ir_values[i] - ir_values[i - 1]);
    }
  }
  return 0.0;
}

double IRUVProfile::w_uv(double t) const {
  if (!(t > 0.0)) throw std::invalid_argument("IRUVProfile::w_uv: t must be > 0");
  switch (uv_kind) {
    case UvKind::Log:
      return std::max(0.0, std::log(1.0 / t));
    case UvKind::Power:
      return std::pow(t, -uv_param);
    case UvKind::Samples: {
      if (t_grid.empty()) return 0.0;
      if (t <= t_grid.front()) return uv_values.front();
      if (t >= t_grid.back()) return uv_values.back();
      const auto it = std::upper_bound(t_grid.begin(), t_grid.end(), t);
      const std::size_t i = static_cast<std::size_t>(it - t_grid.begin());
      const double u = (t - t_grid[i - 1]) / (t_grid[i] - t_grid[i - 1]);
      return uv_values[i - 1] + u * (uv_values[i] - uv_values[i - 1]);
    }
  }
  return 0.0;
}

IRUVProfile IRUVProfile::synthetic_ir_power(double gamma) {
  return synthetic(IrKind::Power, gamma, UvKind::Log, 1.0);
}

IRUVProfile IRUVProfile::synthetic(IrKind ik, double ip, UvKind uk, double up) {
  IRUVProfile p;
  p.ir_kind = ik;
  p.ir_param = ip;
  p.uv_kind = uk;
  p.uv_param = up;
  return p;
}

TwoPointModel TwoPointModel::pv_pair(double m1, double m2) {
  if (!(0.0 < m1 && m1 < m2))
    throw std::invalid_argument("TwoPointModel::pv_pair: need 0 < m1 < m2");
  TwoPointModel m;
  m.shells_ = {{m1, +1.0, 1.0}, {m2, -1.0, 1.0}};
  return m;
}

TwoPointModel TwoPointModel::positive(double mass) {
  if (!(mass > 0.0)) throw std::invalid_argument("TwoPointModel::positive: need mass > 0");
  TwoPointModel m;
  m.shells_ = {{mass, +1.0, 1.0}};
  return m;
}

TwoPointModel TwoPointModel::fixture(std::vector<ShellComponent> shells) {
  TwoPointModel m;
  m.shells_ = std::move(shells);
  return m;
}

TwoPointModel TwoPointModel::profile_only(IRUVProfile profile) {
  TwoPointModel m;
  m.has_profile_ = true;
  m.profile_ = std::move(profile);
  return m;
}

std::string TwoPointModel::describe() const {
  std::ostringstream os;
  if (!has_evaluator()) {
    os << "profile-only";
    return os.str();
  }
  os << "shells[";
  for (std::size_t i = 0; i < shells_.size(); ++i) {
    if (i) os << ", ";
    os << "m=" << shells_[i].mass << " rho=" << shells_[i].rho_coeff
       << " mu=" << shells_[i].mu_weight;
  }
  os << "] c_norm=" << c_norm_;
  return os.str();
}

cplx eval_kernel(const TwoPointModel& model, const CVec2& zeta, Which which) {
  if (!model.has_evaluator())
    throw std::logic_error("eval_kernel: model has no pointwise evaluator");
  if (!imag_in_open_cone(zeta.imag(), Tube::Backward))
    throw std::invalid_argument("eval_kernel: difference not in the backward tube");
  const cplx s = tube_sqrt(zeta);
  cplx acc{0.0, 0.0};
  for (const ShellComponent& sh : model.shells()) {
    const double c = which == Which::Indefinite ? sh.rho_coeff : sh.mu_weight;
    if (c == 0.0) continue;
    acc += c * bessel::k0(sh.mass * s);
  }
  return model.c_norm() * acc;
}

cplx eval_w(const TwoPointModel& model, const TubePoint& zeta) {
  if (zeta.tube() != Tube::Backward)
    throw std::invalid_argument("eval_w: point must lie in the backward tube");
  return eval_kernel(model, zeta.z(), Which::Indefinite);
}

cplx eval_wmaj(const TwoPointModel& model, const TubePoint& z, const TubePoint& zp) {
  if (z.tube() != Tube::Backward || zp.tube() != Tube::Forward)
    throw std::invalid_argument("eval_wmaj: need z in V- tube and z' in V+ tube");
  return eval_kernel(model, z.z() - zp.z(), Which::Majorant);
}

BoundCheck check_bound_eq8(const TwoPointModel& model, Vec2 x, Vec2 xp, Vec2 y) {
  if (!imag_in_open_cone(y, Tube::Forward))
    throw std::invalid_argument("check_bound_eq8: y must be forward timelike");
  const CVec2 arg_w{cplx(x.t - xp.t, -2.0 * y.t), cplx(x.x - xp.x, -2.0 * y.x)};
  const CVec2 diag{cplx(0.0, -2.0 * y.t), cplx(0.0, -2.0 * y.x)};
  const double wval = std::abs(eval_kernel(model, arg_w, Which::Indefinite));
  const double maj = std::abs(eval_kernel(model, diag, Which::Majorant));
  BoundCheck out;
  out.lhs = wval * wval;
  out.rhs = maj * maj;
  out.ok = out.lhs <= out.rhs * (1.0 + 1e-9);
  out.margin = (out.rhs - out.lhs) / (out.rhs + 1e-300);
  return out;
}

std::vector<BoundCheck> bound_sweep(const TwoPointModel& model, std::span<const BoundConfig> cfgs,
                                    par::Exec exec) {
  std::vector<BoundCheck> out(cfgs.size());
  par::map_indexed(exec, cfgs.size(),
                   [&](std::size_t i) { return check_bound_eq8(model, cfgs[i].x, cfgs[i].xp, cfgs[i].y); },
                   out.data());
  return out;
}

std::vector<BoundConfig> random_bound_configs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::uniform_real_distribution<double> y0(0.1, 5.0);
  std::uniform_real_distribution<double> frac(-0.95, 0.95);
  std::vector<BoundConfig> out(n);
  for (auto& c : out) {
    c.x = {pos(rng), pos(rng)};
    c.xp = {pos(rng), pos(rng)};
    const double t = y0(rng);
    c.y = {t, t * frac(rng)};
  }
  return out;
}

IRUVProfile fit_profile(const TwoPointModel& model, std::span<const double> r_grid,
                        std::span<const double> t_grid, double y_fix, par::Exec exec) {
  if (!model.has_evaluator()) throw std::logic_error("fit_profile: model not evaluable");
  for (std::size_t i = 1; i < r_grid.size(); ++i)
    if (!(r_grid[i] > r_grid[i - 1])) throw std::invalid_argument("fit_profile: r_grid not sorted");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("fit_profile: t_grid not sorted");
  if (!t_grid.empty() && !(t_grid.front() > 0.0))
    throw std::invalid_argument("fit_profile: t_grid must be positive");

  // IR probe: z = (0, r) - i(y_fix, 0), z' = +i(y_fix, 0).
  std::vector<double> raw_ir(r_grid.size());
  par::map_indexed(exec, r_grid.size(), [&](std::size_t i) {
    const CVec2 zeta{cplx(0.0, -2.0 * y_fix), cplx(r_grid[i], 0.0)};
    return std::abs(eval_kernel(model, zeta, Which::Majorant));
  }, raw_ir.data());

  // UV probe: x = 0, |y| = t.
  std::vector<double> raw_uv(t_grid.size());
  par::map_indexed(exec, t_grid.size(), [&](std::size_t i) {
    const CVec2 zeta{cplx(0.0, -2.0 * t_grid[i]), cplx(0.0, 0.0)};
    return std::abs(eval_kernel(model, zeta, Which::Majorant));
  }, raw_uv.data());

  IRUVProfile p;
  p.ir_kind = IRUVProfile::IrKind::Samples;
  p.uv_kind = IRUVProfile::UvKind::Samples;
  p.r_grid.assign(r_grid.begin(), r_grid.end());
  p.t_grid.assign(t_grid.begin(), t_grid.end());
  p.ir_values.resize(raw_ir.size());
  p.uv_values.resize(raw_uv.size());
  double run = 0.0;
  for (std::size_t i = 0; i < raw_ir.size(); ++i) {
    run = std::max(run, raw_ir[i]);
    p.ir_values[i] = run;  // running max upward: non-decreasing in r
  }
  run = 0.0;
  for (std::size_t i = raw_uv.size(); i-- > 0;) {
    run = std::max(run, raw_uv[i]);
    p.uv_values[i] = run;  // running max toward t -> 0
  }

  // witness constants on the sampled configurations
  double c_wit = 0.0;
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    const double rho = std::sqrt(r_grid[i] * r_grid[i] + y_fix * y_fix) + y_fix;
    const double denom = p.w_ir(rho) + p.w_uv(2.0 * y_fix);
    if (denom > 0) c_wit = std::max(c_wit, raw_ir[i] / denom);
  }
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double denom = p.w_ir(t_grid[i]) + p.w_uv(2.0 * t_grid[i]);
    if (denom > 0) c_wit = std::max(c_wit, raw_uv[i] / denom);
  }
  p.C1 = p.C2 = std::max(1e-12, c_wit);
  return p;
}

cplx gaussian_ft(const GaussianSpec& f, Vec2 q) {
  const cplx c0(f.center_re.t, f.center_im.t);
  const cplx c1(f.center_re.x, f.center_im.x);
  const cplx phase = cplx(0.0, 1.0) * (q.t * c0 - q.x * c1);
  const double damp = (q.t * q.t + q.x * q.x) / (4.0 * f.nu * f.nu);
  return std::exp(phase - damp);
}

cplx smeared_form(const TwoPointModel& model, const GaussianSpec& f, const GaussianSpec& g,
                  Which which) {
  if (!model.has_evaluator()) throw std::logic_error("smeared_form: model not evaluable");
  cplx total{0.0, 0.0};
  double err_total = 0.0;
  const double nu_t2 = 1.0 / (4.0 * f.nu * f.nu) + 1.0 / (4.0 * g.nu * g.nu);
  const double ymax = std::abs(f.center_im.t) + std::abs(g.center_im.t) +
                      std::abs(f.center_im.x) + std::abs(g.center_im.x);
  double mmax = 0.0;
  for (const auto& sh : model.shells()) mmax = std::max(mmax, sh.mass);
  const double half = 4.0 / std::sqrt(nu_t2) + 2.0 * ymax / nu_t2 + 2.0 * mmax + 2.0;

  for (const ShellComponent& sh : model.shells()) {
    const double coeff = which == Which::Indefinite ? sh.rho_coeff : sh.mu_weight;
    if (coeff == 0.0) continue;
    auto integrand = [&](double pp) -> cplx {
      const double omega = std::sqrt(pp * pp + sh.mass * sh.mass);
      const Vec2 P{omega, pp};
      const cplx fbar = std::conj(gaussian_ft(f, P));
      const cplx gv = gaussian_ft(g, P);
      return fbar * gv / (2.0 * omega);
    };
    quad::QuadError qe;
    const cplx val = quad::integrate_line(integrand, half, 1e-11, &qe);
    err_total += qe.estimate;
    total += coeff * val;
  }
  total *= model.c_norm();
  err_total *= model.c_norm();
  if (err_total > 1e-8 * std::abs(total) + 1e-13) {
    std::ostringstream os;
    os << "smeared_form: quadrature error estimate " << err_total << " exceeds 1e-8 of |value| "
       << std::abs(total);
    throw std::runtime_error(os.str());
  }
  return total;
}

bool support_check_lemma(const TwoPointModel& model) {
  if (!model.has_evaluator()) throw std::logic_error("support_check_lemma: model not evaluable");
  // mu(p) != 0 at a shell point must imply a nonzero signed density on that
  // shell; sampled over a momentum grid on each shell
  for (const ShellComponent& sh : model.shells()) {
    for (int i = 0; i <= 64; ++i) {
      const double pp = -10.0 + 20.0 * i / 64.0;
      const double omega = std::sqrt(pp * pp + sh.mass * sh.mass);
      const double mu_density = sh.mu_weight / (2.0 * omega);
      const double rho_density = sh.rho_coeff / (2.0 * omega);
      if (mu_density != 0.0 && rho_density == 0.0) return false;
    }
  }
  return true;
}

}  // namespace wickconv::fields
