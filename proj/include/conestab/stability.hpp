#pragma once

#include "conestab/constraint_system.hpp"

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace conestab {

/// Base mapping F(p, x) of the generalized equation 0 ∈ F(p, x) + N_Γ(x).
struct ParamMap {
  std::function<Vec(const Vec& p, const Vec& x)> value;
  /// F'((p, x); (dp, dx))
  std::function<Vec(const Vec& p, const Vec& x, const Vec& dp, const Vec& dx)> deriv;
};

/// F(p, x) = A p + B x + c.
ParamMap affine_param_map(const Mat& a, const Mat& b, const Vec& c);

struct GEProblem {
  ConstraintSystem sys;
  ParamMap f;
  Vec pbar;
  Vec xbar;

  Vec vbar() const { return -f.value(pbar, xbar); }
  /// Partial derivative of F in x at (p̄, x̄).
  Mat fx() const;
  /// Checks 0 ∈ F(p̄, x̄) + N_Γ(x̄); throws PreconditionError otherwise.
  void validate(const Tol& tol = {}) const;
};

/// The example1 constraint system with F(p, x, t) = -p - (x, t) at p̄ = 0, (x̄, t̄) = (-1, -1, 0).
GEProblem example41_problem();

struct PhiPoint {
  Vec x;
  Vec lambda;
  Vec v;
};

/// Φ(x, λ, v) = (-v + ∇g(x)λ, g(x) - Π_K(g(x) + λ)).
std::pair<Vec, Vec> phi_residual(const ConstraintSystem& sys, const Vec& x, const Vec& lambda, const Vec& v);

using PhiDistance = std::function<double(const PhiPoint&)>;

/// |Φ(p_k)| / dist(p_k, Φ⁻¹(0, 0)) along a sequence; 0/0 is reported as 0.
std::vector<double> phi_subregularity_probe(const ConstraintSystem& sys, const PhiPoint& center,
                                            const std::vector<PhiPoint>& sequence, const PhiDistance& dist,
                                            const Tol& tol = {});

/// dist to Φ⁻¹(0, 0) for the scalar builtin g(x) = x², K = R₋: |(x, v)|.
double section32_phi_distance(const PhiPoint& p);

struct NetOptions {
  int refinement = 6;          ///< net size 2^refinement · (dim + 1)
  int refine_starts = 8;       ///< local searches started from the best net points
  std::uint64_t seed = 0;      ///< offsets the deterministic net
};

/// Seed from the CONESTAB_SEED environment variable (0 when unset).
std::uint64_t env_seed();

/// Deterministic quasi-uniform directions on the unit sphere of R^n.
Mat direction_net(int n, int count, std::uint64_t seed);

/// Residual of the isolated-calmness inclusion for a unit direction dx (0 means dx violates it).
double isolated_calm_residual(const GEProblem& problem, const Vec& lambda, const Vec& dx, const Tol& tol = {});

/// Isolated calmness of S(p) = {x : 0 ∈ F(p, x) + N_Γ(x)} at (p̄, x̄).
Certificate solution_map_isolated_calm(const GEProblem& problem, const Vec& lambda, const Tol& tol = {},
                                       const NetOptions& net = {});

/// min f(z) - <a, z> s.t. G(z) - b ∈ M°, written as a GE in x = (z, λ) with λ ∈ M.
struct KktProblem {
  int n = 0;
  std::function<Vec(const Vec& z)> grad_f;
  std::function<Mat(const Vec& z)> hess_f;
  ConstraintSystem constraint;  ///< G with cone M°
  ConeDesc multiplier_cone() const { return constraint.cone.polar(); }
};

/// The generalized-equation form with K_GE = Free(n) × M and g the identity.
GEProblem kkt_as_ge(const KktProblem& problem, const Vec& zbar, const Vec& lambdabar);

Certificate kkt_isolated_calm(const KktProblem& problem, const Vec& zbar, const Vec& lambdabar,
                              const Tol& tol = {}, const NetOptions& net = {});

/// (ξ, η) pairs from the lower estimate of the limiting coderivative.
struct NormalPair {
  Vec xi;
  Vec eta;
};

/// (d, w) tangent to gph N_Γ from the graphical-derivative formula.
struct GraphTangent {
  Vec d;
  Vec w;
};

/// Pairs for a fixed η; empty when g'(x)η lies outside the critical cone.
std::vector<NormalPair> regular_normal_lower_generate(const ConstraintSystem& sys, const Vec& x, const Vec& v,
                                                      const Vec& lambda, const Vec& eta, int count,
                                                      std::uint64_t seed, const Tol& tol = {});
/// Pairs with sampled η.
std::vector<NormalPair> regular_normal_lower_sample(const ConstraintSystem& sys, const Vec& x, const Vec& v,
                                                    const Vec& lambda, int count, std::uint64_t seed,
                                                    const Tol& tol = {});
std::vector<GraphTangent> sample_graph_tangents(const ConstraintSystem& sys, const Vec& x, const Vec& v,
                                                const Vec& lambda, int count, std::uint64_t seed,
                                                const Tol& tol = {});

}  // namespace conestab
