#include "conestab/dykstra.hpp"

#include <cmath>
#include <limits>

namespace conestab {

DykstraResult dykstra(const Projector& a, const Projector& b, const Vec& start, const Tol& tol) {
  DykstraResult res;
  const double scale = std::max(1.0, start.norm());
  Vec x = start;
  Vec p = Vec::Zero(start.size());
  Vec q = Vec::Zero(start.size());
  Vec y = start;
  // Stall detection on the gap: compare against the value a window ago.
  constexpr int window = 200;
  double gap_window = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= tol.max_iter; ++it) {
    y = a(x + p);
    p = x + p - y;
    Vec x_next = b(y + q);
    q = y + q - x_next;
    res.last_move = (x_next - x).norm();
    res.gap = (x_next - y).norm();
    x = std::move(x_next);
    res.iterations = it;
    if (res.last_move <= tol.zero * scale && res.gap <= tol.membership * scale) {
      res.converged = true;
      break;
    }
    if (it % window == 0) {
      if (res.gap > tol.membership * scale && res.gap > 0.999 * gap_window &&
          res.last_move <= 1e-3 * res.gap) {
        res.stalled = true;
        break;
      }
      gap_window = res.gap;
    }
  }
  res.point = x;
  res.partner = y;
  return res;
}

AffineProjector::AffineProjector(const Mat& m, const Vec& rhs, double rank_tol) : m_(m), rhs_(rhs) {
  require_dim(rhs.size(), m.rows(), "affine projector");
  m_pinv_ = pinv(m, rank_tol);
  particular_ = m_pinv_ * rhs;
  residual_ = (m * particular_ - rhs).norm();
  kernel_ = rank_info(m, rank_tol).kernel;
}

Vec AffineProjector::operator()(const Vec& x) const {
  return x - m_pinv_ * (m_ * x - rhs_);
}

Vec project_span(const Mat& basis, const Vec& x) {
  if (basis.cols() == 0) return Vec::Zero(x.size());
  return basis * (basis.transpose() * x);
}

}  // namespace conestab
