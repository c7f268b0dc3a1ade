#include "conestab/proj_deriv.hpp"

#include "conestab/detail/overloaded.hpp"
#include "conestab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace conestab {

using detail::overloaded;

namespace {

Mat sym_pinv(const Mat& a, double thr) {
  const SymEig e = sym_eig(a);
  Vec inv = Vec::Zero(e.values.size());
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    if (std::abs(e.values(i)) > thr) inv(i) = 1.0 / e.values(i);
  }
  return e.vectors * inv.asDiagonal() * e.vectors.transpose();
}

Vec dir_deriv_orthant_plus(const Eigen::Ref<const Vec>& z, const Eigen::Ref<const Vec>& h, double thr) {
  Vec out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    out(i) = z(i) > thr ? h(i) : (z(i) < -thr ? 0.0 : std::max(h(i), 0.0));
  }
  return out;
}

Vec dir_deriv_psd_plus(const Eigen::Ref<const Vec>& z, const Eigen::Ref<const Vec>& h, int n, double zero) {
  const SymEig e = sym_eig(smat(z, n));
  const Vec& d = e.values;
  const double thr = zero * std::max(1.0, d.cwiseAbs().maxCoeff());
  Mat ht = e.vectors.transpose() * smat(h, n) * e.vectors;
  // 0: positive, 1: near zero, 2: negative
  std::vector<int> cls(static_cast<std::size_t>(n));
  std::vector<int> beta;
  for (int i = 0; i < n; ++i) {
    cls[static_cast<std::size_t>(i)] = d(i) > thr ? 0 : (d(i) >= -thr ? 1 : 2);
    if (cls[static_cast<std::size_t>(i)] == 1) beta.push_back(i);
  }
  Mat out = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int ci = cls[static_cast<std::size_t>(i)], cj = cls[static_cast<std::size_t>(j)];
      if (ci == 0 && cj == 0) {
        out(i, j) = ht(i, j);
      } else if ((ci == 0 && cj == 1) || (ci == 1 && cj == 0)) {
        out(i, j) = ht(i, j);
      } else if (ci == 0 && cj == 2) {
        out(i, j) = ht(i, j) * d(i) / (d(i) - d(j));
      } else if (ci == 2 && cj == 0) {
        out(i, j) = ht(i, j) * d(j) / (d(j) - d(i));
      }
    }
  }
  if (!beta.empty()) {
    const Mat sub = ht(beta, beta);
    out(beta, beta) = smat(project_psd(svec(sub), static_cast<int>(beta.size()), Sign::plus),
                           static_cast<int>(beta.size()));
  }
  return svec(e.vectors * out * e.vectors.transpose());
}

Vec dir_deriv_soc(const Eigen::Ref<const Vec>& z, const Eigen::Ref<const Vec>& h, double thr) {
  const Eigen::Index n = z.size();
  if (z.norm() <= thr) return project_soc(h);
  const double z0 = z(0);
  const double r = z.tail(n - 1).norm();
  if (z0 - r > thr) return h;
  if (-z0 - r > thr) return Vec::Zero(n);
  const Vec w = z.tail(n - 1) / r;
  const double h0 = h(0);
  const double wh = w.dot(h.tail(n - 1));
  const auto jacobian = [&](double ratio) {
    Vec out(n);
    out(0) = 0.5 * (h0 + wh);
    out.tail(n - 1) = 0.5 * (w * h0 + (1.0 + ratio) * h.tail(n - 1) - ratio * w * wh);
    return out;
  };
  if (std::abs(z0 - r) <= thr) return wh - h0 <= 0 ? Vec(h) : jacobian(1.0);
  if (std::abs(z0 + r) <= thr) {
    Vec out(n);
    const double c = 0.5 * std::max(h0 + wh, 0.0);
    out(0) = c;
    out.tail(n - 1) = c * w;
    return out;
  }
  return jacobian(z0 / r);
}

}  // namespace

GraphPoint::GraphPoint(ConeDesc cone, AmbientVec y, AmbientVec lambda, const Tol& tol)
    : cone_(std::move(cone)), y_(std::move(y)), lambda_(std::move(lambda)), tol_(tol) {
  require_graph_point(cone_, y_, lambda_, tol_);
  const double thr = zero_threshold(tol_, y_.norm()) + tol_.membership;
  for (std::size_t b = 0; b < cone_.size(); ++b) {
    if (const auto* p = std::get_if<Semidefinite>(&cone_.block(b))) {
      y_pinv_.push_back(sym_pinv(smat(y_.segment(cone_.offset(b), cone_.block_dim(b)), p->order), thr));
    } else {
      y_pinv_.emplace_back();
    }
  }
}

GraphPoint GraphPoint::from_sum(const ConeDesc& cone, const AmbientVec& z, const Tol& tol) {
  const AmbientVec y = project(cone, z);
  return GraphPoint(cone, y, z - y, tol);
}

AmbientVec proj_dir_deriv(const ConeDesc& k, const AmbientVec& z, const AmbientVec& h, const Tol& tol) {
  require_dim(z.size(), k.dim(), "proj_dir_deriv point");
  require_dim(h.size(), k.dim(), "proj_dir_deriv direction");
  require_finite(z, "proj_dir_deriv");
  require_finite(h, "proj_dir_deriv");
  AmbientVec out(z.size());
  for (std::size_t b = 0; b < k.size(); ++b) {
    const auto zb = z.segment(k.offset(b), k.block_dim(b));
    const auto hb = h.segment(k.offset(b), k.block_dim(b));
    const double thr = zero_threshold(tol, zb.norm());
    out.segment(k.offset(b), k.block_dim(b)) = std::visit(
        overloaded{
            [&](const Orthant& p) -> Vec {
              return p.sign == Sign::plus ? dir_deriv_orthant_plus(zb, hb, thr)
                                          : Vec(-dir_deriv_orthant_plus(-zb, -hb, thr));
            },
            [&](const ZeroCone&) -> Vec { return Vec::Zero(zb.size()); },
            [&](const FreeCone&) -> Vec { return hb; },
            [&](const SecondOrder& p) -> Vec {
              return p.sign == Sign::plus ? dir_deriv_soc(zb, hb, thr) : Vec(-dir_deriv_soc(-zb, -hb, thr));
            },
            [&](const Semidefinite& p) -> Vec {
              return p.sign == Sign::plus ? dir_deriv_psd_plus(zb, hb, p.order, tol.zero)
                                          : Vec(-dir_deriv_psd_plus(-zb, -hb, p.order, tol.zero));
            },
        },
        k.block(b));
  }
  return out;
}

double sigma_form(const GraphPoint& gp, const AmbientVec& h) {
  const ConeDesc& k = gp.cone();
  require_dim(h.size(), k.dim(), "sigma term direction");
  double total = 0.0;
  for (std::size_t b = 0; b < k.size(); ++b) {
    const auto hb = h.segment(k.offset(b), k.block_dim(b));
    const auto yb = gp.y().segment(k.offset(b), k.block_dim(b));
    const auto lb = gp.lambda().segment(k.offset(b), k.block_dim(b));
    total += std::visit(
        overloaded{
            [&](const Semidefinite& p) {
              const Mat hm = smat(hb, p.order);
              return -2.0 * (smat(lb, p.order) * hm * gp.y_pinv(b) * hm).trace();
            },
            [&](const SecondOrder& p) {
              const double thr = zero_threshold(gp.tol(), yb.norm()) + gp.tol().membership;
              const double r = yb.tail(p.dim - 1).norm();
              if (yb.norm() <= thr || sign_factor(p.sign) * yb(0) - r > thr) return 0.0;
              return lb(0) / yb(0) * (hb(0) * hb(0) - hb.tail(p.dim - 1).squaredNorm());
            },
            [&](const auto&) { return 0.0; },
        },
        k.block(b));
  }
  return total;
}

AmbientVec sigma_form_grad(const GraphPoint& gp, const AmbientVec& h) {
  const ConeDesc& k = gp.cone();
  require_dim(h.size(), k.dim(), "sigma term direction");
  AmbientVec out = AmbientVec::Zero(h.size());
  for (std::size_t b = 0; b < k.size(); ++b) {
    const auto hb = h.segment(k.offset(b), k.block_dim(b));
    const auto yb = gp.y().segment(k.offset(b), k.block_dim(b));
    const auto lb = gp.lambda().segment(k.offset(b), k.block_dim(b));
    auto ob = out.segment(k.offset(b), k.block_dim(b));
    if (const auto* p = std::get_if<Semidefinite>(&k.block(b))) {
      const Mat hm = smat(hb, p->order);
      const Mat lm = smat(lb, p->order);
      const Mat& yp = gp.y_pinv(b);
      ob = svec(-2.0 * (lm * hm * yp + yp * hm * lm));
    } else if (const auto* s = std::get_if<SecondOrder>(&k.block(b))) {
      const double thr = zero_threshold(gp.tol(), yb.norm()) + gp.tol().membership;
      const double r = yb.tail(s->dim - 1).norm();
      if (yb.norm() <= thr || sign_factor(s->sign) * yb(0) - r > thr) continue;
      const double c = 2.0 * lb(0) / yb(0);
      ob(0) = c * hb(0);
      ob.tail(s->dim - 1) = -c * hb.tail(s->dim - 1);
    }
  }
  return out;
}

namespace {

void require_critical(const GraphPoint& gp, const AmbientVec& h) {
  const ConeSet c = critical_cone(gp.cone(), gp.y(), gp.lambda(), gp.tol());
  if (!c.contains(h, gp.tol())) {
    throw PreconditionError("direction is outside the critical cone: dist = " + std::to_string(c.dist(h)));
  }
}

}  // namespace

double sigma_term(const GraphPoint& gp, const AmbientVec& h) {
  require_critical(gp, h);
  return sigma_form(gp, h);
}

AmbientVec sigma_grad(const GraphPoint& gp, const AmbientVec& h) {
  require_critical(gp, h);
  return sigma_form_grad(gp, h);
}

DnkResiduals dnk_residuals(const GraphPoint& gp, const AmbientVec& dy, const AmbientVec& dlam, const Tol& tol) {
  const ConeDesc& k = gp.cone();
  require_dim(dy.size(), k.dim(), "graph tangent Δy");
  require_dim(dlam.size(), k.dim(), "graph tangent Δλ");
  DnkResiduals r;
  const double ny = dy.norm(), nl = dlam.norm();
  r.projection = (dy - proj_dir_deriv(k, gp.z(), dy + dlam, tol)).norm();
  r.projection_ok = r.projection <= tol.membership * (1.0 + ny + nl);

  const ConeSet c = critical_cone(k, gp.y(), gp.lambda(), tol);
  r.critical = c.dist(dy);
  const AmbientVec grad = sigma_form_grad(gp, dy);
  r.polar = c.polar().dist(dlam - 0.5 * grad);
  r.complement = std::abs(dy.dot(dlam) - sigma_form(gp, dy));
  r.conditions_ok = r.critical <= tol.membership * (1.0 + ny) &&
                    r.polar <= tol.membership * (1.0 + nl + grad.norm()) &&
                    r.complement <= tol.membership * (1.0 + ny * nl);
  return r;
}

Certificate dnk_contains(const GraphPoint& gp, const AmbientVec& dy, const AmbientVec& dlam, const Tol& tol) {
  Certificate cert;
  cert.tol = tol;
  cert.method = "projection-derivative residual and three-condition system";
  const DnkResiduals r = dnk_residuals(gp, dy, dlam, tol);
  cert.residual = r.projection;
  std::ostringstream os;
  os << "projection residual " << r.projection << "; critical " << r.critical << ", polar " << r.polar
     << ", complementarity " << r.complement;
  cert.detail = os.str();
  cert.checked = {"graph point on gph N_K"};
  if (r.projection_ok && r.conditions_ok) {
    cert.verdict = Verdict::holds;
  } else if (!r.projection_ok && !r.conditions_ok) {
    cert.verdict = Verdict::fails;
    AmbientVec w(dy.size() + dlam.size());
    w << dy, dlam;
    cert.witness = w;
    if (r.critical > tol.membership * (1.0 + dy.norm())) cert.detail += "; critical cone violation";
  } else {
    cert.verdict = Verdict::inconclusive;
    cert.detail += r.projection_ok ? "; routes disagree (projection passes)" : "; routes disagree (conditions pass)";
  }
  return cert;
}

}  // namespace conestab
