#pragma once

#include "conestab/cone_set.hpp"

#include <functional>
#include <vector>

namespace conestab {

/// C_K(y, λ) = T_K(y) ∩ λ⊥, closed form in the joint eigenbasis of y and λ.
ConeSet critical_cone(const ConeDesc& k, const AmbientVec& y, const AmbientVec& lambda,
                      const Tol& tol = {});

/// T_{N_K(y)}(λ), realized as the polar of the critical cone.
ConeSet tangent_of_normal(const ConeDesc& k, const AmbientVec& y, const AmbientVec& lambda,
                          const Tol& tol = {});

/// C° ∩ d⊥ for d ∈ C (exact exposed face when C has closed-form blocks).
ConeSet normal_of_critical(const ConeSet& c, const Vec& d, const Tol& tol = {});

/// Same set, always realized by Dykstra between C° and d⊥; used as a cross-check.
ConeSet normal_of_critical_iterative(const ConeSet& c, const Vec& d, const Tol& tol = {});

/// Decides span(basis) ∩ C = {0}.
Certificate subspace_cone_trivial(const Mat& basis, const ConeSet& c, const Tol& tol = {});

using Membership = std::function<bool(const Vec&)>;

/// One-sided radial probe: v + t z ∈ Ω for every t in tgrid.
bool radial_probe(const Membership& omega, const Vec& v, const Vec& z,
                  const std::vector<double>& tgrid = {1e-1, 1e-2, 1e-3, 1e-4});

}  // namespace conestab
