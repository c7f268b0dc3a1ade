#include "conestab/polyhedral.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace conestab {

namespace {

struct Ray {
  Vec v;
  std::vector<bool> zeros;  // which processed rows vanish on v
};

constexpr double kEps = 1e-10;

void normalize(Vec& v) {
  const double n = v.norm();
  if (n > 0) v /= n;
}

bool subset(const std::vector<bool>& small, const std::vector<bool>& big) {
  for (std::size_t i = 0; i < small.size(); ++i) {
    if (small[i] && !big[i]) return false;
  }
  return true;
}

}  // namespace

ConeGenerators dd_generators(const Mat& ineq, const Mat& eq) {
  const Eigen::Index n = std::max(ineq.cols(), eq.cols());
  if (ineq.rows() > 0 && eq.rows() > 0 && ineq.cols() != eq.cols()) {
    throw DimensionError("double description: column counts differ");
  }
  // Parametrize the equality kernel, then work in its coordinates.
  Mat basis = eq.rows() > 0 ? rank_info(eq, 1e-12).kernel : Mat(Mat::Identity(n, n));
  const Eigen::Index m = basis.cols();
  const Mat rows = ineq.rows() > 0 ? Mat(ineq * basis) : Mat(0, m);

  std::vector<Vec> lin;
  for (Eigen::Index i = 0; i < m; ++i) lin.push_back(Vec::Unit(m, i));
  std::vector<Ray> rays;
  const auto nrows = static_cast<std::size_t>(rows.rows());

  for (std::size_t k = 0; k < nrows; ++k) {
    const Vec a = rows.row(static_cast<Eigen::Index>(k)).transpose();
    const double an = std::max(a.norm(), 1e-300);
    // Break a lineality direction if the row does not vanish on it.
    std::size_t best = lin.size();
    double best_val = kEps;
    for (std::size_t i = 0; i < lin.size(); ++i) {
      const double v = std::abs(a.dot(lin[i])) / an;
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    if (best < lin.size()) {
      Vec piv = lin[best];
      if (a.dot(piv) < 0) piv = -piv;
      const double ap = a.dot(piv);
      std::vector<Vec> next;
      for (std::size_t i = 0; i < lin.size(); ++i) {
        if (i == best) continue;
        Vec l = lin[i] - (a.dot(lin[i]) / ap) * piv;
        normalize(l);
        next.push_back(l);
      }
      lin = std::move(next);
      for (auto& r : rays) {
        r.v -= (a.dot(r.v) / ap) * piv;
        normalize(r.v);
        r.zeros[k] = true;
      }
      Ray pr{piv, std::vector<bool>(nrows, false)};
      for (std::size_t j = 0; j < k; ++j) pr.zeros[j] = true;
      normalize(pr.v);
      rays.push_back(std::move(pr));
      continue;
    }
    std::vector<Ray> pos, neg, next;
    for (auto& r : rays) {
      const double v = a.dot(r.v) / an;
      if (v > kEps) {
        pos.push_back(r);
      } else if (v < -kEps) {
        neg.push_back(r);
      } else {
        r.zeros[k] = true;
        next.push_back(r);
      }
    }
    const std::vector<Ray> all = [&] {
      std::vector<Ray> x = pos;
      x.insert(x.end(), neg.begin(), neg.end());
      x.insert(x.end(), next.begin(), next.end());
      return x;
    }();
    for (const auto& p : pos) {
      for (const auto& q : neg) {
        std::vector<bool> common(nrows, false);
        for (std::size_t j = 0; j < k; ++j) common[j] = p.zeros[j] && q.zeros[j];
        bool adjacent = true;
        for (const auto& r : all) {
          if (&r.v == &p.v || &r.v == &q.v) continue;
          if (r.v.isApprox(p.v) || r.v.isApprox(q.v)) continue;
          if (subset(common, r.zeros)) {
            adjacent = false;
            break;
          }
        }
        if (!adjacent) continue;
        Ray c{a.dot(p.v) * q.v - a.dot(q.v) * p.v, common};
        normalize(c.v);
        c.zeros[k] = true;
        next.push_back(std::move(c));
      }
    }
    next.insert(next.end(), pos.begin(), pos.end());
    rays = std::move(next);
  }

  ConeGenerators out;
  out.rays = Mat(n, static_cast<Eigen::Index>(rays.size()));
  for (std::size_t i = 0; i < rays.size(); ++i) out.rays.col(static_cast<Eigen::Index>(i)) = basis * rays[i].v;
  out.lineality = Mat(n, static_cast<Eigen::Index>(lin.size()));
  for (std::size_t i = 0; i < lin.size(); ++i) out.lineality.col(static_cast<Eigen::Index>(i)) = basis * lin[i];
  return out;
}

}  // namespace conestab
