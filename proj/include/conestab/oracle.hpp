#pragma once

#include "conestab/cone_set.hpp"
#include "conestab/constraint_system.hpp"
#include "conestab/proj_deriv.hpp"

#include <vector>

namespace conestab {

/// Brute-force validators. Slow by design; used as referees for the closed forms.

/// (Π_K(z), z - Π_K(z)) as a validated graph point.
GraphPoint graph_sample(const ConeDesc& k, const AmbientVec& z, const Tol& tol = {});

inline const std::vector<double>& default_fd_grid() {
  static const std::vector<double> grid{1e-2, 1e-3, 1e-4, 1e-5};
  return grid;
}

struct FdEstimate {
  AmbientVec value;
  double error = 0.0;  ///< spread between neighbouring extrapolants
};

/// Richardson-extrapolated difference quotients of Π_K along h.
FdEstimate fd_proj_deriv(const ConeDesc& k, const AmbientVec& z, const AmbientVec& h,
                         const std::vector<double>& tgrid = default_fd_grid());

/// |(y + tΔy) - Π_K(y + tΔy + λ + tΔλ)| / t for each t in tgrid.
std::vector<double> graph_tangent_residual(const ConeDesc& k, const GraphPoint& gp, const AmbientVec& dy,
                                           const AmbientVec& dlam,
                                           const std::vector<double>& tgrid = default_fd_grid());

/// Second-order expansion estimate of the sigma term: -2<λ, Π_K(y + th) - y - th>/t², extrapolated.
FdEstimate curvature_expansion(const GraphPoint& gp, const AmbientVec& h,
                               const std::vector<double>& tgrid = default_fd_grid());

/// Generators (columns) of a coordinatewise polyhedral cone.
Mat coord_generators(const CoordSet& s);

/// Exact decision of span(basis) ∩ cone(generators) = {0}; ambient dimension at most 8.
bool polyhedral_trivial_exact(const Mat& generators, const Mat& basis);

/// For each t: min over the fiber {λ' : ∇g(x + td)λ' = v + tw} of
/// |g(x + td) - Π_K(g(x + td) + λ')| / t, found by multi-start compass search.
std::vector<double> ngamma_graph_residual(const ConstraintSystem& sys, const Vec& x, const Vec& v,
                                          const Vec& lambda, const Vec& d, const Vec& w,
                                          const std::vector<double>& tgrid = {1e-1, 1e-2, 1e-3});

}  // namespace conestab
