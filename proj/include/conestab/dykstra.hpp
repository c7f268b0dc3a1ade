#pragma once

#include "conestab/cone.hpp"

#include <functional>

namespace conestab {

using Projector = std::function<Vec(const Vec&)>;

struct DykstraResult {
  Vec point;         ///< last iterate of the second set
  Vec partner;       ///< last iterate of the first set
  double gap = 0.0;  ///< |point - partner|
  double last_move = 0.0;
  int iterations = 0;
  bool converged = false;
  bool stalled = false;  ///< gap stopped decreasing while above tolerance
};

/// Dykstra's alternating projection of `start` onto A ∩ B.
/// Stops once the iterate moves less than tol.zero (scaled by the start norm)
/// with gap below tol.membership, or at tol.max_iter.
DykstraResult dykstra(const Projector& a, const Projector& b, const Vec& start, const Tol& tol);

/// Projector onto the affine set {x : m x = rhs}; throws if it is empty.
class AffineProjector {
 public:
  AffineProjector(const Mat& m, const Vec& rhs, double rank_tol);
  Vec operator()(const Vec& x) const;
  const Vec& least_squares() const { return particular_; }
  const Mat& kernel() const { return kernel_; }
  double consistency_residual() const { return residual_; }

 private:
  Mat m_pinv_;
  Mat m_;
  Vec rhs_;
  Vec particular_;
  Mat kernel_;
  double residual_ = 0.0;
};

/// Projector onto span(basis) where basis has orthonormal columns.
Vec project_span(const Mat& basis, const Vec& x);

}  // namespace conestab
