#include "conestab/oracle.hpp"

#include "conestab/dykstra.hpp"
#include "conestab/polyhedral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace conestab {

GraphPoint graph_sample(const ConeDesc& k, const AmbientVec& z, const Tol& tol) {
  return GraphPoint::from_sum(k, z, tol);
}

namespace {

void require_grid(const std::vector<double>& tgrid) {
  if (tgrid.empty()) throw std::invalid_argument("empty step grid");
  for (std::size_t i = 0; i < tgrid.size(); ++i) {
    if (!(tgrid[i] > 0.0) || (i > 0 && !(tgrid[i] < tgrid[i - 1]))) {
      throw std::invalid_argument("step grid must be positive and strictly decreasing");
    }
  }
}

/// Order-1 Richardson extrapolation of q(t) = a + O(t) over a decreasing grid.
FdEstimate richardson(const std::vector<double>& tgrid, const std::vector<Vec>& q) {
  FdEstimate out;
  if (q.size() == 1) {
    out.value = q[0];
    out.error = std::numeric_limits<double>::infinity();
    return out;
  }
  std::vector<Vec> ext;
  for (std::size_t i = 0; i + 1 < q.size(); ++i) {
    const double r = tgrid[i] / tgrid[i + 1];
    ext.push_back((r * q[i + 1] - q[i]) / (r - 1.0));
  }
  if (ext.size() == 1) {
    out.value = ext[0];
    out.error = (q[1] - q[0]).norm();
    return out;
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < ext.size(); ++i) {
    const double diff = (ext[i + 1] - ext[i]).norm();
    if (diff < best) {
      best = diff;
      out.value = ext[i + 1];
    }
  }
  out.error = best;
  return out;
}

}  // namespace

FdEstimate fd_proj_deriv(const ConeDesc& k, const AmbientVec& z, const AmbientVec& h,
                         const std::vector<double>& tgrid) {
  require_dim(z.size(), k.dim(), "point");
  require_dim(h.size(), k.dim(), "direction");
  require_finite(z, "point");
  require_finite(h, "direction");
  require_grid(tgrid);
  const Vec base = project(k, z);
  std::vector<Vec> q;
  for (const double t : tgrid) q.push_back((project(k, Vec(z + t * h)) - base) / t);
  FdEstimate out = richardson(tgrid, q);
  if (!out.value.allFinite()) throw NumericalError("non-finite difference quotient");
  return out;
}

std::vector<double> graph_tangent_residual(const ConeDesc& k, const GraphPoint& gp, const AmbientVec& dy,
                                           const AmbientVec& dlam, const std::vector<double>& tgrid) {
  require_dim(dy.size(), k.dim(), "Δy");
  require_dim(dlam.size(), k.dim(), "Δλ");
  require_grid(tgrid);
  std::vector<double> out;
  for (const double t : tgrid) {
    const Vec yt = gp.y() + t * dy;
    const Vec lt = gp.lambda() + t * dlam;
    out.push_back((yt - project(k, Vec(yt + lt))).norm() / t);
  }
  return out;
}

FdEstimate curvature_expansion(const GraphPoint& gp, const AmbientVec& h, const std::vector<double>& tgrid) {
  require_dim(h.size(), gp.cone().dim(), "direction");
  require_grid(tgrid);
  std::vector<Vec> q;
  for (const double t : tgrid) {
    const Vec yt = gp.y() + t * h;
    const Vec excess = project(gp.cone(), yt) - yt;
    q.push_back(Vec::Constant(1, -2.0 * gp.lambda().dot(excess) / (t * t)));
  }
  return richardson(tgrid, q);
}

Mat coord_generators(const CoordSet& s) {
  const auto n = static_cast<Eigen::Index>(s.coords.size());
  std::vector<Vec> cols;
  for (Eigen::Index i = 0; i < n; ++i) {
    switch (s.coords[static_cast<std::size_t>(i)]) {
      case Coord::free:
        cols.push_back(Vec::Unit(n, i));
        cols.push_back(-Vec::Unit(n, i));
        break;
      case Coord::nonneg:
        cols.push_back(Vec::Unit(n, i));
        break;
      case Coord::nonpos:
        cols.push_back(-Vec::Unit(n, i));
        break;
      case Coord::zero:
        break;
    }
  }
  Mat out(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = cols[c];
  return out;
}

bool polyhedral_trivial_exact(const Mat& generators, const Mat& basis) {
  constexpr Eigen::Index kMaxDim = 8;
  const Eigen::Index n = generators.rows();
  if (n > kMaxDim) throw std::invalid_argument("polyhedral referee is limited to ambient dimension 8");
  require_dim(basis.rows(), n, "subspace basis");
  const Eigen::Index k = generators.cols();
  if (k == 0 || basis.cols() == 0) return true;
  // cone ∩ L = {Gθ : θ >= 0, P_{L⊥} G θ = 0}
  const Mat orth = complement_basis(basis, static_cast<int>(n), 1e-12);
  const Mat eq = orth.transpose() * generators;
  const ConeGenerators gens = dd_generators(Mat::Identity(k, k), eq);
  const double scale = std::max(1.0, generators.norm());
  for (const Mat* set : {&gens.rays, &gens.lineality}) {
    for (Eigen::Index c = 0; c < set->cols(); ++c) {
      const Vec theta = set->col(c).normalized();
      if ((generators * theta).norm() > 1e-9 * scale) return false;
    }
  }
  return true;
}

std::vector<double> ngamma_graph_residual(const ConstraintSystem& sys, const Vec& x, const Vec& v,
                                          const Vec& lambda, const Vec& d, const Vec& w,
                                          const std::vector<double>& tgrid) {
  require_dim(d.size(), sys.domain_dim(), "d");
  require_dim(w.size(), sys.domain_dim(), "w");
  require_dim(lambda.size(), sys.range_dim(), "lambda");
  require_grid(tgrid);
  std::vector<double> out;
  for (const double t : tgrid) {
    const Vec xt = x + t * d;
    const Vec vt = v + t * w;
    const Vec gt = sys.value(xt);
    const Mat jt = sys.jacobian(xt).transpose();
    const AffineProjector fiber(jt, vt, 1e-12);
    const Mat& ker = fiber.kernel();
    const Vec base = fiber(lambda);
    const auto objective = [&](const Vec& c) {
      const Vec lam = base + ker * c;
      return (gt - project(sys.cone, Vec(gt + lam))).norm() + (jt * lam - vt).norm();
    };
    const Eigen::Index kd = ker.cols();
    const double unit = t * std::max(1.0, lambda.norm() + w.norm());
    double best = objective(Vec::Zero(kd));
    std::vector<Vec> starts{Vec::Zero(kd)};
    for (Eigen::Index i = 0; i < kd; ++i) {
      for (const double s : {1.0, -1.0, 10.0, -10.0}) starts.push_back(s * unit * Vec::Unit(kd, i));
    }
    for (const Vec& start : starts) {
      Vec cur = start;
      double val = objective(cur);
      double step = unit;
      int evals = 0;
      while (step > 1e-14 * unit && evals < 4000 && kd > 0) {
        bool improved = false;
        for (Eigen::Index i = 0; i < kd && !improved; ++i) {
          for (const double s : {1.0, -1.0}) {
            const Vec trial = cur + s * step * Vec::Unit(kd, i);
            const double tv = objective(trial);
            ++evals;
            if (tv < val) {
              cur = trial;
              val = tv;
              improved = true;
              break;
            }
          }
        }
        if (improved) step *= 2.0;
        else step *= 0.5;
      }
      best = std::min(best, val);
    }
    out.push_back(best / t);
  }
  return out;
}

}  // namespace conestab
