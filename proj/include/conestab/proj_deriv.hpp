#pragma once

#include "conestab/cone_set.hpp"

#include <optional>
#include <vector>

namespace conestab {

/// A point (y, λ) of gph N_K together with z = y + λ and per-block spectral data.
class GraphPoint {
 public:
  /// Validates y = Π_K(y + λ); throws PreconditionError otherwise.
  GraphPoint(ConeDesc cone, AmbientVec y, AmbientVec lambda, const Tol& tol = {});
  /// (Π_K(z), z - Π_K(z)).
  static GraphPoint from_sum(const ConeDesc& cone, const AmbientVec& z, const Tol& tol = {});

  const ConeDesc& cone() const { return cone_; }
  const AmbientVec& y() const { return y_; }
  const AmbientVec& lambda() const { return lambda_; }
  AmbientVec z() const { return y_ + lambda_; }
  const Tol& tol() const { return tol_; }
  /// Pseudo-inverse of the y-block for PSD blocks (empty for other blocks).
  const Mat& y_pinv(std::size_t block) const { return y_pinv_.at(block); }

 private:
  ConeDesc cone_;
  AmbientVec y_;
  AmbientVec lambda_;
  Tol tol_;
  std::vector<Mat> y_pinv_;
};

/// Π'_K(z; h) from per-block closed forms.
AmbientVec proj_dir_deriv(const ConeDesc& k, const AmbientVec& z, const AmbientVec& h,
                          const Tol& tol = {});

/// Υ(h) = -σ(λ, T²_K(y, h)); h must lie in the critical cone.
double sigma_term(const GraphPoint& gp, const AmbientVec& h);
/// Gradient of the quadratic form Υ at h.
AmbientVec sigma_grad(const GraphPoint& gp, const AmbientVec& h);
/// Same quadratic form without the critical-cone precondition.
double sigma_form(const GraphPoint& gp, const AmbientVec& h);
AmbientVec sigma_form_grad(const GraphPoint& gp, const AmbientVec& h);

/// Residuals of both characterizations of Δλ ∈ DN_K(y|λ)(Δy).
struct DnkResiduals {
  double projection = 0.0;   ///< |Δy - Π'_K(z; Δy + Δλ)|
  double critical = 0.0;     ///< dist(Δy, C_K(y, λ))
  double polar = 0.0;        ///< dist(Δλ - ½∇Υ(Δy), C°)
  double complement = 0.0;   ///< |<Δy, Δλ> - Υ(Δy)|
  bool projection_ok = false;
  bool conditions_ok = false;
};

DnkResiduals dnk_residuals(const GraphPoint& gp, const AmbientVec& dy, const AmbientVec& dlam,
                           const Tol& tol = {});
Certificate dnk_contains(const GraphPoint& gp, const AmbientVec& dy, const AmbientVec& dlam,
                         const Tol& tol = {});

}  // namespace conestab
