#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wickconv/parallel.hpp"
#include "wickconv/weights.hpp"

namespace wickconv::spectral {

enum class Orientation { Forward, Backward };

struct LorentzCone {
  int dim = 2;
  Orientation orientation = Orientation::Forward;
};

// Closed-cone membership: +-p0 >= |p_vec|, exact comparison.
bool cone_contains(const LorentzCone& cone, std::span<const double> p);

// Euclidean distance to the closed cone via the closed-form projection:
// inside -> 0; polar side -> |p|; else boundary projection (a - s)/sqrt(2)
// with s the signed time component and a the spatial norm.
double dist_to_cone(const LorentzCone& cone, std::span<const double> p);

// Product-cone membership of Eq-style suffix sums: p_m + ... + p_n in the
// closed backward cone for every m. Points are concatenated d-vectors.
bool in_Kn_minus(std::span<const double> points, int dim);

// Batch kernels over many point tuples (grid sweeps).
std::vector<char> in_Kn_minus_batch(std::span<const double> tuples, int n_points, int dim,
                                    par::Exec exec);
std::vector<double> dist_to_cone_batch(const LorentzCone& cone, std::span<const double> points,
                                       par::Exec exec);

// Entire test function: amplitude * prod_i zeta_i^{powers_i} * exp(-c sum_i zeta_i^2).
struct EntireGaussian {
  double amplitude = 1.0;
  double c = 1.0;                  // quadratic decay coefficient, >= 0
  std::vector<int> powers;         // per-coordinate monomial powers (empty = none)
  // log |g(p + iq)|; -inf when amplitude = 0
  double log_abs(std::span<const double> p, std::span<const double> q) const;
};

struct EbNormSpec {
  weights::WeightFunction alpha;   // convex, increasing
  weights::WeightFunction beta;    // convex in ln s
  double A = 1.0;
  double B = 1.0;
};

struct NormGrid {
  double p_radius = 6.0;
  double q_radius = 6.0;
  int points = 33;  // per axis, odd so the origin is a node
};

struct EbNormResult {
  double log_value = 0.0;
  bool infinite = false;      // maximand still climbing on the outer shell
  double outer_margin = 0.0;  // interior sup minus outer-shell sup (finite case)
};

// ||g||_{A,B} = sup |g(p+iq)| exp{-alpha(A|q|) + beta(|p|/B)} over the grid,
// with a growth-trend check on the outer shell.
EbNormResult eb_norm(const EntireGaussian& g, const EbNormSpec& spec, int dim,
                     const NormGrid& grid, par::Exec exec = par::Exec::Parallel);

// ||g||_{U,A,B}: same with the extra damping exp{-alpha(dist_U(A p))}.
EbNormResult eb_cone_norm(const EntireGaussian& g, const EbNormSpec& spec,
                          const std::optional<LorentzCone>& cone_u, int dim, const NormGrid& grid,
                          par::Exec exec = par::Exec::Parallel);

}  // namespace wickconv::spectral
