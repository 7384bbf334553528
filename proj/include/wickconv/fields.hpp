#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wickconv/parallel.hpp"

namespace wickconv::fields {

using cplx = std::complex<double>;

// Minkowski 2-vectors, components (x0, x1); dot(a, b) = a0 b0 - a1 b1.
struct Vec2 {
  double t = 0.0;
  double x = 0.0;
};

struct CVec2 {
  cplx t{0.0, 0.0};
  cplx x{0.0, 0.0};

  CVec2() = default;
  CVec2(cplx t_, cplx x_) : t(t_), x(x_) {}
  CVec2(Vec2 re, Vec2 im) : t(re.t, im.t), x(re.x, im.x) {}
  Vec2 real() const { return {t.real(), x.real()}; }
  Vec2 imag() const { return {t.imag(), x.imag()}; }
};

inline CVec2 operator-(const CVec2& a, const CVec2& b) { return {a.t - b.t, a.x - b.x}; }
inline CVec2 operator+(const CVec2& a, const CVec2& b) { return {a.t + b.t, a.x + b.x}; }

cplx minkowski_square(const CVec2& z);
double euclid_norm(const CVec2& z);

enum class Tube { Backward, Forward };

bool imag_in_open_cone(Vec2 y, Tube which);

// A point of the tubular analyticity domain; construction validates that the
// imaginary part lies in the declared open cone.
class TubePoint {
 public:
  TubePoint(cplx z0, cplx z1, Tube which);
  const CVec2& z() const { return z_; }
  Tube tube() const { return tube_; }

 private:
  CVec2 z_;
  Tube tube_;
};

// s(zeta) = principal sqrt of -zeta.zeta, Re s > 0 on the backward tube.
// Throws when arg(-zeta^2) comes within 1e-9 of the cut at pi.
cplx tube_sqrt(const CVec2& zeta);

enum class Which { Indefinite, Majorant };

struct ShellComponent {
  double mass = 1.0;
  double rho_coeff = 1.0;  // signed weight in the two-point density
  double mu_weight = 1.0;  // weight in the majorant density (>= 0)
};

struct IRUVProfile {
  enum class IrKind { Bounded, Log, Power, Samples };
  enum class UvKind { Log, Power, Samples };

  IrKind ir_kind = IrKind::Log;
  UvKind uv_kind = UvKind::Log;
  double ir_param = 1.0;  // exponent for Power, level for Bounded
  double uv_param = 1.0;
  double C1 = 1.0;
  double C2 = 1.0;
  // sample tables (used when kind == Samples); r ascending, t ascending
  std::vector<double> r_grid, ir_values;
  std::vector<double> t_grid, uv_values;

  double w_ir(double r) const;  // monotone non-decreasing in r
  double w_uv(double t) const;  // increasing as t -> 0

  static IRUVProfile synthetic_ir_power(double gamma);
  static IRUVProfile synthetic(IrKind ik, double ip, UvKind uk, double up);
};

class TwoPointModel {
 public:
  static TwoPointModel pv_pair(double m1, double m2);
  static TwoPointModel positive(double m);
  // arbitrary shell content; used by tests to exercise the negative branch of
  // the support lemma
  static TwoPointModel fixture(std::vector<ShellComponent> shells);
  static TwoPointModel profile_only(IRUVProfile profile);

  bool has_evaluator() const { return !shells_.empty(); }
  std::span<const ShellComponent> shells() const { return shells_; }
  double c_norm() const { return c_norm_; }
  void set_c_norm(double c) { c_norm_ = c; }
  const IRUVProfile* profile() const { return has_profile_ ? &profile_ : nullptr; }
  std::string describe() const;

 private:
  std::vector<ShellComponent> shells_;
  double c_norm_ = 0.15915494309189535;  // 1/(2 pi)
  bool has_profile_ = false;
  IRUVProfile profile_;
};

// Pointwise kernel w (signed) or w_mu (majorant) at a difference variable in
// the backward tube.
cplx eval_kernel(const TwoPointModel& model, const CVec2& zeta, Which which);

cplx eval_w(const TwoPointModel& model, const TubePoint& zeta);
cplx eval_wmaj(const TwoPointModel& model, const TubePoint& z, const TubePoint& zp);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
  double margin = 0.0;  // (rhs - lhs) / rhs
};

BoundCheck check_bound_eq8(const TwoPointModel& model, Vec2 x, Vec2 xp, Vec2 y);

struct BoundConfig {
  Vec2 x, xp, y;
};

// Grid kernel: evaluates check_bound_eq8 over many configurations.
std::vector<BoundCheck> bound_sweep(const TwoPointModel& model, std::span<const BoundConfig> cfgs,
                                    par::Exec exec);
std::vector<BoundConfig> random_bound_configs(std::size_t n, std::uint64_t seed);

// Monotone envelopes of |w_maj| sampled along spatial separations (IR) and
// along the tube depth (UV), with witness constants for the two-sided bound.
IRUVProfile fit_profile(const TwoPointModel& model, std::span<const double> r_grid,
                        std::span<const double> t_grid, double y_fix = 1e-2,
                        par::Exec exec = par::Exec::Parallel);

// Gaussian test function (nu/sqrt(pi))^d exp(-nu^2 (xi - c)^2_E) with complex
// center c = center_re + i center_im; normalized so the integral is 1.
struct GaussianSpec {
  Vec2 center_re;
  Vec2 center_im;
  double nu = 1.0;
};

// Fourier transform value at real momentum q, phase convention
// fhat(q) = int f(xi) e^{i q. xi} dxi with the Minkowski dot.
cplx gaussian_ft(const GaussianSpec& f, Vec2 q);

// <f, g>_S or (f, g)_S by shell quadrature in momentum space. Throws when the
// quadrature error estimate exceeds 1e-8 of the magnitude.
cplx smeared_form(const TwoPointModel& model, const GaussianSpec& f, const GaussianSpec& g,
                  Which which);

// Checks that the majorant's momentum support is carried by the shells of the
// signed density.
bool support_check_lemma(const TwoPointModel& model);

}  // namespace wickconv::fields
