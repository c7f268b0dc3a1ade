#pragma once

#include "conestab/cone_set.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace conestab {

/// A twice-differentiable map g: X -> Y together with the cone K ⊆ Y.
/// Callbacks must be pure and reentrant.
struct ConstraintSystem {
  std::string name;
  Layout domain;  ///< layout of X (only used for I/O)
  ConeDesc cone;
  std::function<Vec(const Vec& x)> value;
  std::function<Vec(const Vec& x, const Vec& h)> jac_apply;
  std::function<Vec(const Vec& x, const Vec& mu)> adj_apply;
  /// ∇²<λ, g>(x) d
  std::function<Vec(const Vec& x, const Vec& lambda, const Vec& d)> hess_apply;

  int domain_dim() const { return layout_dim(domain); }
  int range_dim() const { return cone.dim(); }
  /// g'(x) as a dense range_dim × domain_dim matrix.
  Mat jacobian(const Vec& x) const;
  /// ∇²<λ, g>(x) as a dense matrix.
  Mat hessian(const Vec& x, const Vec& lambda) const;
  /// Checks that every callback is set and the cone is non-empty.
  void validate() const;
};

// Builtin instances.
/// g(x, t) = (Diag(x) + tE + I, t), K = S²₊ × R₊.
ConstraintSystem example1_system();
/// g(X) = (X + C, X) on symmetric 2×2 X, C = diag(0, -1), K = {0} × S²₊.
ConstraintSystem example3_system();
/// Scalar g(x) = x², K = R₋.
ConstraintSystem section32_system();
/// g(x) = A x + b.
ConstraintSystem affine_system(const ConeDesc& k, const Mat& a, const Vec& b);
/// g_i(x) = ½ xᵀ Q_i x + (A x)_i + b_i, coordinates in the cone's vectorized form.
ConstraintSystem quadratic_system(const ConeDesc& k, const std::vector<Mat>& q_list, const Mat& a,
                                  const Vec& b);
/// g(x) = x.
ConstraintSystem identity_system(const ConeDesc& k);

/// Throws PreconditionError("point infeasible: dist(g(x),K)=…") when g(x) ∉ K.
void require_feasible(const ConstraintSystem& sys, const Vec& x, const Tol& tol);
/// Throws PreconditionError unless λ ∈ M_x(v).
void require_multiplier(const ConstraintSystem& sys, const Vec& x, const Vec& v, const Vec& lambda,
                        const Tol& tol);
/// Residuals |∇g(x)λ - v| and dist(λ, N_K(g(x))).
std::pair<double, double> multiplier_residuals(const ConstraintSystem& sys, const Vec& x, const Vec& v,
                                               const Vec& lambda, const Tol& tol);

/// g'(x) h ∈ T_K(g(x)); exact description of T_Γ(x) under metric subregularity of G.
bool gamma_tangent_contains(const ConstraintSystem& sys, const Vec& x, const Vec& h, const Tol& tol = {});

struct MultiplierSolveResult {
  bool found = false;
  Vec lambda;                 ///< representative multiplier
  double affine_residual = 0.0;
  double cone_residual = 0.0;
  std::vector<Vec> members;   ///< distinct members found by re-seeding (includes lambda)
  Certificate existence;      ///< holds: member found; fails: v ∉ N_Γ(x)
  Certificate uniqueness;     ///< SRCQ certificate for the representative
};

/// `existence_only` skips member re-seeding and the uniqueness certificate.
enum class MultiplierSearch { full, existence_only };

MultiplierSolveResult multiplier_solve(const ConstraintSystem& sys, const Vec& x, const Vec& v,
                                       const Tol& tol = {}, MultiplierSearch depth = MultiplierSearch::full);

Certificate srcq_check(const ConstraintSystem& sys, const Vec& x, const Vec& v, const Vec& lambda,
                       const Tol& tol = {});
Certificate nondegeneracy_check(const ConstraintSystem& sys, const Vec& x, const Tol& tol = {});
/// `candidate`, when given and valid, is tried first as the relative-interior multiplier.
Certificate strict_complementarity_check(const ConstraintSystem& sys, const Vec& x, const Vec& v,
                                         const Tol& tol = {},
                                         const std::optional<Vec>& candidate = std::nullopt);
bool critical_cone_gamma_contains(const ConstraintSystem& sys, const Vec& x, const Vec& v,
                                  const Vec& lambda, const Vec& d, const Tol& tol = {});

enum class Route { a, b, both };

struct GraphDerivResult {
  Certificate combined;
  Certificate route_a;
  std::optional<Certificate> route_b;
  /// False only when one route holds and the other fails.
  bool routes_agree = true;
};

/// Decides (d, w) ∈ T_{gph N_Γ}(x, v) from the multiplier λ.
GraphDerivResult ngamma_graph_deriv(const ConstraintSystem& sys, const Vec& x, const Vec& v,
                                    const Vec& lambda, const Vec& d, const Vec& w, const Tol& tol = {},
                                    Route route = Route::both);
Certificate ngamma_graph_deriv_contains(const ConstraintSystem& sys, const Vec& x, const Vec& v,
                                        const Vec& lambda, const Vec& d, const Vec& w,
                                        const Tol& tol = {}, Route route = Route::both);

/// dist(r, Jᵀ S) for a closed convex cone S, with a dual lower bound.
struct ConeRangeDistance {
  double upper = 0.0;  ///< |Jᵀξ - r| at the computed ξ
  double lower = 0.0;  ///< certified up to the dual feasibility gap below
  double dual_gap = 0.0;
  Vec xi;
};
ConeRangeDistance cone_range_distance(const Mat& jt, const ConeSet& s, const Vec& r, const Tol& tol);

}  // namespace conestab
