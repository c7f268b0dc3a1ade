#include "conestab/constraint_system.hpp"

#include "conestab/dykstra.hpp"
#include "conestab/geometry.hpp"
#include "conestab/proj_deriv.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace conestab {

Mat ConstraintSystem::jacobian(const Vec& x) const {
  const int n = domain_dim();
  Mat j(range_dim(), n);
  for (int i = 0; i < n; ++i) j.col(i) = jac_apply(x, Vec::Unit(n, i));
  return j;
}

Mat ConstraintSystem::hessian(const Vec& x, const Vec& lambda) const {
  const int n = domain_dim();
  Mat h(n, n);
  for (int i = 0; i < n; ++i) h.col(i) = hess_apply(x, lambda, Vec::Unit(n, i));
  return 0.5 * (h + h.transpose());
}

void ConstraintSystem::validate() const {
  if (!value || !jac_apply || !adj_apply || !hess_apply) {
    throw std::invalid_argument("constraint system '" + name + "' has unset callbacks");
  }
  if (cone.size() == 0) throw std::invalid_argument("constraint system '" + name + "' has an empty cone");
}

namespace {

Vec sym_to_vec2(const Mat& m) { return svec(m); }

}  // namespace

ConstraintSystem example1_system() {
  ConstraintSystem s;
  s.name = "example1";
  s.domain = {{false, 3}};
  s.cone = ConeDesc{Semidefinite{2, Sign::plus}, Orthant{1, Sign::plus}};
  const Mat e = Mat::Ones(2, 2);
  s.value = [e](const Vec& x) {
    require_dim(x.size(), 3, "example1 point");
    Vec out(4);
    Mat m = Mat::Identity(2, 2) + x(2) * e;
    m(0, 0) += x(0);
    m(1, 1) += x(1);
    out << sym_to_vec2(m), x(2);
    return out;
  };
  s.jac_apply = [e](const Vec&, const Vec& h) {
    Vec out(4);
    Mat m = h(2) * e;
    m(0, 0) += h(0);
    m(1, 1) += h(1);
    out << sym_to_vec2(m), h(2);
    return out;
  };
  s.adj_apply = [](const Vec&, const Vec& mu) {
    const Mat m = smat(mu.head(3), 2);
    return Vec((Vec(3) << m(0, 0), m(1, 1), m.sum() + mu(3)).finished());
  };
  s.hess_apply = [](const Vec&, const Vec&, const Vec& d) { return Vec(Vec::Zero(d.size())); };
  return s;
}

ConstraintSystem example3_system() {
  ConstraintSystem s;
  s.name = "example3";
  s.domain = {{true, 2}};
  s.cone = ConeDesc{ZeroCone{3}, Semidefinite{2, Sign::plus}};
  Mat c = Mat::Zero(2, 2);
  c(1, 1) = -1.0;
  const Vec cv = svec(c);
  s.value = [cv](const Vec& x) {
    require_dim(x.size(), 3, "example3 point");
    Vec out(6);
    out << x + cv, x;
    return out;
  };
  s.jac_apply = [](const Vec&, const Vec& h) {
    Vec out(6);
    out << h, h;
    return out;
  };
  s.adj_apply = [](const Vec&, const Vec& mu) { return Vec(mu.head(3) + mu.tail(3)); };
  s.hess_apply = [](const Vec&, const Vec&, const Vec& d) { return Vec(Vec::Zero(d.size())); };
  return s;
}

ConstraintSystem section32_system() {
  ConstraintSystem s;
  s.name = "section32";
  s.domain = {{false, 1}};
  s.cone = ConeDesc{Orthant{1, Sign::minus}};
  s.value = [](const Vec& x) { return Vec(x.cwiseProduct(x)); };
  s.jac_apply = [](const Vec& x, const Vec& h) { return Vec(2.0 * x.cwiseProduct(h)); };
  s.adj_apply = [](const Vec& x, const Vec& mu) { return Vec(2.0 * x.cwiseProduct(mu)); };
  s.hess_apply = [](const Vec&, const Vec& lam, const Vec& d) { return Vec(2.0 * lam.cwiseProduct(d)); };
  return s;
}

ConstraintSystem affine_system(const ConeDesc& k, const Mat& a, const Vec& b) {
  require_dim(a.rows(), k.dim(), "affine map rows");
  require_dim(b.size(), k.dim(), "affine offset");
  ConstraintSystem s;
  s.name = "affine";
  s.domain = {{false, static_cast<int>(a.cols())}};
  s.cone = k;
  s.value = [a, b](const Vec& x) { return Vec(a * x + b); };
  s.jac_apply = [a](const Vec&, const Vec& h) { return Vec(a * h); };
  s.adj_apply = [a](const Vec&, const Vec& mu) { return Vec(a.transpose() * mu); };
  s.hess_apply = [](const Vec&, const Vec&, const Vec& d) { return Vec(Vec::Zero(d.size())); };
  return s;
}

ConstraintSystem quadratic_system(const ConeDesc& k, const std::vector<Mat>& q_list, const Mat& a,
                                  const Vec& b) {
  require_dim(a.rows(), k.dim(), "quadratic map rows");
  require_dim(b.size(), k.dim(), "quadratic offset");
  require_dim(static_cast<Eigen::Index>(q_list.size()), k.dim(), "quadratic term count");
  std::vector<Mat> qs;
  qs.reserve(q_list.size());
  for (const auto& q : q_list) {
    require_dim(q.rows(), a.cols(), "quadratic term");
    require_dim(q.cols(), a.cols(), "quadratic term");
    qs.push_back(0.5 * (q + q.transpose()));
  }
  ConstraintSystem s;
  s.name = "quadratic";
  s.domain = {{false, static_cast<int>(a.cols())}};
  s.cone = k;
  s.value = [qs, a, b](const Vec& x) {
    Vec out = a * x + b;
    for (std::size_t i = 0; i < qs.size(); ++i) out(static_cast<Eigen::Index>(i)) += 0.5 * x.dot(qs[i] * x);
    return out;
  };
  s.jac_apply = [qs, a](const Vec& x, const Vec& h) {
    Vec out = a * h;
    for (std::size_t i = 0; i < qs.size(); ++i) out(static_cast<Eigen::Index>(i)) += x.dot(qs[i] * h);
    return out;
  };
  s.adj_apply = [qs, a](const Vec& x, const Vec& mu) {
    Vec out = a.transpose() * mu;
    for (std::size_t i = 0; i < qs.size(); ++i) out += mu(static_cast<Eigen::Index>(i)) * (qs[i] * x);
    return out;
  };
  s.hess_apply = [qs](const Vec&, const Vec& lam, const Vec& d) {
    Vec out = Vec::Zero(d.size());
    for (std::size_t i = 0; i < qs.size(); ++i) out += lam(static_cast<Eigen::Index>(i)) * (qs[i] * d);
    return out;
  };
  return s;
}

ConstraintSystem identity_system(const ConeDesc& k) {
  ConstraintSystem s = affine_system(k, Mat::Identity(k.dim(), k.dim()), Vec::Zero(k.dim()));
  s.name = "identity";
  s.domain = layout_of(k);
  return s;
}

void require_feasible(const ConstraintSystem& sys, const Vec& x, const Tol& tol) {
  require_dim(x.size(), sys.domain_dim(), "point");
  const Vec y = sys.value(x);
  require_dim(y.size(), sys.range_dim(), "g(x)");
  const double d = dist(sys.cone, y);
  if (!std::isfinite(d) || d > tol.membership * std::max(1.0, y.norm())) {
    std::ostringstream os;
    os << "point infeasible: dist(g(x),K)=" << d;
    throw PreconditionError(os.str());
  }
}

std::pair<double, double> multiplier_residuals(const ConstraintSystem& sys, const Vec& x, const Vec& v,
                                               const Vec& lambda, const Tol& tol) {
  require_dim(v.size(), sys.domain_dim(), "v");
  require_dim(lambda.size(), sys.range_dim(), "multiplier");
  const double aff = (sys.adj_apply(x, lambda) - v).norm();
  const double cone = normal_cone(sys.cone, sys.value(x), tol).dist(lambda);
  return {aff, cone};
}

void require_multiplier(const ConstraintSystem& sys, const Vec& x, const Vec& v, const Vec& lambda,
                        const Tol& tol) {
  require_feasible(sys, x, tol);
  const auto [aff, cone] = multiplier_residuals(sys, x, v, lambda, tol);
  const double scale = std::max(1.0, std::max(v.norm(), lambda.norm()));
  if (aff > tol.membership * scale || cone > tol.membership * scale) {
    std::ostringstream os;
    os << "lambda is not a multiplier: |grad g(x) lambda - v| = " << aff << ", dist(lambda, N_K) = " << cone;
    throw PreconditionError(os.str());
  }
}

bool gamma_tangent_contains(const ConstraintSystem& sys, const Vec& x, const Vec& h, const Tol& tol) {
  require_feasible(sys, x, tol);
  require_dim(h.size(), sys.domain_dim(), "direction");
  return tangent_cone(sys.cone, sys.value(x), tol).contains(sys.jac_apply(x, h), tol);
}

namespace {

const char* const kAssumeSubregularG = "metric subregularity of G(x) = g(x) - K at x";

bool is_new_member(const std::vector<Vec>& members, const Vec& m) {
  return std::none_of(members.begin(), members.end(), [&](const Vec& o) {
    return (o - m).norm() <= 1e-6 * std::max(1.0, o.norm());
  });
}

}  // namespace

MultiplierSolveResult multiplier_solve(const ConstraintSystem& sys, const Vec& x, const Vec& v, const Tol& tol,
                                       MultiplierSearch depth) {
  tol.validate();
  require_feasible(sys, x, tol);
  require_dim(v.size(), sys.domain_dim(), "v");
  MultiplierSolveResult res;
  res.existence.tol = tol;
  res.existence.method = "Dykstra between {λ : ∇g(x)λ = v} and N_K(g(x))";
  res.existence.assumed = {kAssumeSubregularG};
  const Vec y = sys.value(x);
  const Mat jt = sys.jacobian(x).transpose();
  const ConeSet normal = normal_cone(sys.cone, y, tol);
  const AffineProjector fiber(jt, v, tol.zero);
  const double scale = std::max(1.0, v.norm());
  if (fiber.consistency_residual() > tol.membership * scale) {
    res.existence.verdict = Verdict::fails;
    res.existence.residual = fiber.consistency_residual();
    res.existence.witness = v;
    res.existence.detail = "v is not in the range of ∇g(x)";
    return res;
  }
  const auto onto_fiber = [&fiber](const Vec& l) { return fiber(l); };
  const auto onto_normal = [&normal](const Vec& l) { return normal.project(l); };
  const auto solve_from = [&](const Vec& seed) { return dykstra(onto_normal, onto_fiber, seed, tol); };

  const Vec seed = fiber.least_squares();
  const DykstraResult first = solve_from(seed);
  const Vec candidate = first.point;
  const double cone_res = normal.dist(candidate);
  const double lscale = std::max(scale, candidate.norm());
  res.existence.residual = cone_res;
  if (cone_res <= tol.membership * lscale) {
    res.found = true;
    res.lambda = candidate;
    res.affine_residual = (jt * candidate - v).norm();
    res.cone_residual = cone_res;
    res.existence.verdict = Verdict::holds;
    res.existence.detail = "member found after " + std::to_string(first.iterations) + " iterations";
  } else if (first.stalled) {
    res.existence.verdict = Verdict::fails;
    res.existence.witness = v;
    res.existence.detail = "alternating projections stalled with gap " + std::to_string(first.gap);
    return res;
  } else {
    res.existence.verdict = Verdict::inconclusive;
    res.existence.detail = "iteration cap reached with gap " + std::to_string(first.gap);
    return res;
  }

  res.members.push_back(res.lambda);
  if (depth == MultiplierSearch::existence_only) return res;
  // Deterministic re-seeding along Ker ∇g(x) probes non-uniqueness.
  const Mat& ker = fiber.kernel();
  for (Eigen::Index i = 0; i < ker.cols(); ++i) {
    for (const double s : {1.0, -1.0, 10.0, -10.0}) {
      const DykstraResult r = solve_from(res.lambda + s * lscale * ker.col(i));
      if (normal.dist(r.point) <= tol.membership * std::max(lscale, r.point.norm()) &&
          is_new_member(res.members, r.point)) {
        res.members.push_back(r.point);
      }
    }
  }
  res.uniqueness = srcq_check(sys, x, v, res.lambda, tol);
  return res;
}

Certificate srcq_check(const ConstraintSystem& sys, const Vec& x, const Vec& v, const Vec& lambda, const Tol& tol) {
  tol.validate();
  require_multiplier(sys, x, v, lambda, tol);
  const Mat jt = sys.jacobian(x).transpose();
  const Mat ker = rank_info(jt, tol.zero).kernel;
  const ConeSet c = tangent_of_normal(sys.cone, sys.value(x), lambda, tol);
  Certificate cert = subspace_cone_trivial(ker, c, tol);
  cert.method = "Ker ∇g(x) ∩ T_{N_K(g(x))}(λ) = {0}: " + cert.method;
  cert.assumed = {kAssumeSubregularG};
  cert.checked = {"λ ∈ M_x(v)"};
  const std::string verdict = to_string(cert.verdict);
  cert.detail += "; SRCQ at x w.r.t. λ: " + verdict + "; M_x isolated calm at v for λ: " + verdict +
                 "; dim Ker ∇g(x) = " + std::to_string(ker.cols());
  return cert;
}

Certificate nondegeneracy_check(const ConstraintSystem& sys, const Vec& x, const Tol& tol) {
  tol.validate();
  require_feasible(sys, x, tol);
  Certificate cert;
  cert.tol = tol;
  cert.method = "rank of [g'(x) | lin T_K(g(x))]";
  const Mat j = sys.jacobian(x);
  const Mat lin = tangent_cone(sys.cone, sys.value(x), tol).lineality_basis();
  Mat stacked(j.rows(), j.cols() + lin.cols());
  stacked << j, lin;
  const RankInfo info = rank_info(stacked, tol.zero);
  const Eigen::Index m = j.rows();
  // Equivalent dual form: Ker ∇g(x) ∩ (lin T_K)⊥.
  const RankInfo dual = rank_info(stacked.transpose(), tol.zero);
  std::ostringstream os;
  os << "rank " << info.rank << " of " << m << "; dim Ker ∇g(x) ∩ (lin T_K)⊥ = " << dual.kernel.cols();
  if (lin.cols() < m) {
    const Mat perp = complement_basis(lin, static_cast<int>(m), 1e-12);
    const Mat restricted = j.transpose() * perp;
    if (restricted.size() > 0) {
      Eigen::JacobiSVD<Mat> svd(restricted);
      os << "; min singular value of ∇g(x) on (lin T_K)⊥ = " << svd.singularValues().minCoeff();
    }
  }
  cert.detail = os.str();
  const Vec sv = Eigen::JacobiSVD<Mat>(stacked).singularValues();
  cert.residual = sv.size() >= m ? sv(m - 1) : 0.0;
  if (info.rank == m) {
    cert.verdict = Verdict::holds;
  } else {
    cert.verdict = Verdict::fails;
    cert.witness = Vec(dual.kernel.col(0));
  }
  return cert;
}

Certificate strict_complementarity_check(const ConstraintSystem& sys, const Vec& x, const Vec& v, const Tol& tol,
                                         const std::optional<Vec>& candidate) {
  tol.validate();
  Certificate cert;
  cert.tol = tol;
  cert.method = "relative-interior multiplier search (shrunken normal cone, Dykstra)";
  cert.assumed = {kAssumeSubregularG};
  const Vec y = sys.value(x);
  if (candidate) {
    const auto [aff, cone] = multiplier_residuals(sys, x, v, *candidate, tol);
    const double scale = std::max(1.0, std::max(v.norm(), candidate->norm()));
    if (aff <= tol.membership * scale && cone <= tol.membership * scale &&
        ri_normal_contains(sys.cone, y, *candidate, tol)) {
      cert.verdict = Verdict::holds;
      cert.witness = *candidate;
      cert.residual = aff;
      cert.checked = {"supplied multiplier lies in ri N_K(g(x))"};
      return cert;
    }
  }
  const MultiplierSolveResult ms = multiplier_solve(sys, x, v, tol);
  if (ms.existence.fails()) throw PreconditionError("v is not in N_Γ(x): " + ms.existence.detail);
  if (!ms.found) {
    cert.verdict = Verdict::inconclusive;
    cert.detail = "multiplier search did not converge";
    return cert;
  }
  cert.checked = {"λ ∈ M_x(v)"};
  const auto accept = [&](const Vec& lam, const std::string& how) {
    cert.verdict = Verdict::holds;
    cert.witness = lam;
    cert.residual = (sys.adj_apply(x, lam) - v).norm();
    cert.detail = how;
  };
  for (const Vec& m : ms.members) {
    if (ri_normal_contains(sys.cone, y, m, tol)) {
      accept(m, "multiplier from the feasibility solve lies in ri N_K(g(x))");
      return cert;
    }
  }
  const ConeSet normal = normal_cone(sys.cone, y, tol);
  const Mat jt = sys.jacobian(x).transpose();
  const AffineProjector fiber(jt, v, tol.zero);
  const double scale = std::max(1.0, std::max(v.norm(), ms.lambda.norm()));
  for (const double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const auto onto_fiber = [&fiber](const Vec& l) { return fiber(l); };
    const auto onto_shrunk = [&](const Vec& l) { return normal.project_shrunk(l, eps * scale); };
    const DykstraResult r = dykstra(onto_fiber, onto_shrunk, ms.lambda, tol);
    const double aff = (jt * r.point - v).norm();
    if (aff <= tol.membership * scale && ri_normal_contains(sys.cone, y, r.point, tol)) {
      std::ostringstream os;
      os << "interior multiplier at margin " << eps * scale;
      accept(r.point, os.str());
      return cert;
    }
  }
  cert.residual = 0.0;
  if (ms.uniqueness.holds()) {
    cert.verdict = Verdict::fails;
    cert.witness = ms.lambda;
    cert.checked.push_back("multiplier set is a singleton (SRCQ holds)");
    cert.detail = "the unique multiplier is not in ri N_K(g(x))";
  } else {
    cert.verdict = Verdict::inconclusive;
    cert.detail = "no relative-interior multiplier found; uniqueness not certified";
  }
  return cert;
}

bool critical_cone_gamma_contains(const ConstraintSystem& sys, const Vec& x, const Vec& v, const Vec& lambda,
                                  const Vec& d, const Tol& tol) {
  require_multiplier(sys, x, v, lambda, tol);
  require_dim(d.size(), sys.domain_dim(), "direction");
  return critical_cone(sys.cone, sys.value(x), lambda, tol).contains(sys.jac_apply(x, d), tol);
}

ConeRangeDistance cone_range_distance(const Mat& jt, const ConeSet& s, const Vec& r, const Tol& tol) {
  ConeRangeDistance out;
  const Eigen::Index m = jt.cols();
  Vec xi = Vec::Zero(m);
  if (m == 0) {
    out.upper = out.lower = r.norm();
    out.xi = xi;
    return out;
  }
  const double lip = std::max(1e-300, std::pow(Eigen::JacobiSVD<Mat>(jt).singularValues()(0), 2));
  Vec prev = xi;
  Vec mom = xi;
  double theta = 1.0;
  for (int it = 0; it < tol.max_iter; ++it) {
    const Vec grad = jt.transpose() * (jt * mom - r);
    const Vec next = s.project(mom - grad / lip);
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    mom = next + ((theta - 1.0) / theta_next) * (next - prev);
    const double move = (next - prev).norm();
    prev = next;
    theta = theta_next;
    if (move <= tol.zero * std::max(1.0, next.norm())) break;
  }
  xi = prev;
  const Vec e = r - jt * xi;
  out.upper = e.norm();
  out.xi = xi;
  if (out.upper <= 1e-300) return out;
  const Vec u = e / out.upper;
  const Vec ju = jt.transpose() * u;
  out.dual_gap = s.project(ju).norm();
  out.lower = std::max(0.0, u.dot(r) - out.dual_gap * (1.0 + 2.0 * xi.norm()));
  return out;
}

namespace {

Vec concat(const Vec& a, const Vec& b) {
  Vec out(a.size() + b.size());
  out << a, b;
  return out;
}

Certificate route_a(const GraphPoint& gp, const ConeSet& c, const Mat& jt,
                    const Vec& dy, const Vec& target, const Vec& witness, const Tol& tol) {
  Certificate cert;
  cert.tol = tol;
  cert.method = "route A: Dykstra between the fiber {∇g(x)ξ = r} and N_C(g'(x)d)";
  const Vec dyc = c.project(dy);
  const Vec r = target - 0.5 * (jt * sigma_form_grad(gp, dyc));
  const ConeSet face = normal_of_critical(c, dyc, tol);
  const double scale = std::max(1.0, r.norm());
  const AffineProjector fiber(jt, r, tol.zero);
  if (fiber.consistency_residual() <= tol.membership * scale) {
    const auto onto_face = [&face](const Vec& l) { return face.project(l); };
    const auto onto_fiber = [&fiber](const Vec& l) { return fiber(l); };
    const DykstraResult dr = dykstra(onto_face, onto_fiber, fiber.least_squares(), tol);
    const double gap = face.dist(dr.point);
    if (gap <= tol.membership * std::max(scale, dr.point.norm())) {
      cert.verdict = Verdict::holds;
      cert.residual = gap;
      cert.detail = "ξ found after " + std::to_string(dr.iterations) + " iterations";
      return cert;
    }
  }
  const ConeRangeDistance dist = cone_range_distance(jt, face, r, tol);
  cert.residual = dist.upper;
  std::ostringstream os;
  os << "dist(r, ∇g(x) N_C) in [" << dist.lower << ", " << dist.upper << "]";
  cert.detail = os.str();
  if (dist.lower >= 10.0 * tol.membership * scale) {
    cert.verdict = Verdict::fails;
    cert.witness = witness;
  } else if (dist.upper <= tol.membership * scale) {
    cert.verdict = Verdict::holds;
  } else {
    cert.verdict = Verdict::inconclusive;
  }
  return cert;
}

// Fixed point of h ↦ P_{fiber + Δy}(h - Π'(z; h) + Δy); only the projection derivative is used.
Certificate route_b(const GraphPoint& gp, const Mat& jt, const Vec& dy, const Vec& target, const Vec& witness,
                    const Tol& tol) {
  Certificate cert;
  cert.tol = tol;
  cert.method = "route B: fixed point of Π'_K(z; ·) over the multiplier fiber";
  const ConeDesc& k = gp.cone();
  const Vec z = gp.z();
  const AffineProjector fiber(jt, target, tol.zero);
  const double scale = std::max(1.0, target.norm() + dy.norm());
  if (fiber.consistency_residual() > tol.membership * scale) {
    cert.verdict = Verdict::fails;
    cert.residual = fiber.consistency_residual();
    cert.witness = witness;
    cert.detail = "w - ∇²<λ,g>(x)d is not in the range of ∇g(x)";
    return cert;
  }
  Vec h = dy + fiber.least_squares();
  double res = 0.0;
  double best = std::numeric_limits<double>::infinity();
  double window_best = best;
  int it = 0;
  for (; it < tol.max_iter; ++it) {
    const Vec pd = proj_dir_deriv(k, z, h, tol);
    res = (dy - pd).norm();
    if (res <= tol.membership * std::max(scale, h.norm())) break;
    h = dy + fiber(h - pd);
    best = std::min(best, res);
    if ((it + 1) % 500 == 0) {
      if (best > 0.999 * window_best) break;
      window_best = best;
    }
  }
  cert.residual = res;
  std::ostringstream os;
  os << "|Δy - Π'(z; Δy + μ)| = " << res << " after " << it << " iterations";
  cert.detail = os.str();
  if (res <= tol.membership * std::max(scale, h.norm())) {
    cert.verdict = Verdict::holds;
  } else if (res >= 10.0 * tol.membership * scale) {
    cert.verdict = Verdict::fails;
    cert.witness = witness;
  } else {
    cert.verdict = Verdict::inconclusive;
  }
  return cert;
}

}  // namespace

GraphDerivResult ngamma_graph_deriv(const ConstraintSystem& sys, const Vec& x, const Vec& v, const Vec& lambda,
                                    const Vec& d, const Vec& w, const Tol& tol, Route route) {
  tol.validate();
  require_multiplier(sys, x, v, lambda, tol);
  require_dim(d.size(), sys.domain_dim(), "d");
  require_dim(w.size(), sys.domain_dim(), "w");
  GraphDerivResult out;
  const Vec y = sys.value(x);
  const Mat jt = sys.jacobian(x).transpose();
  const Vec dy = sys.jac_apply(x, d);
  const ConeSet c = critical_cone(sys.cone, y, lambda, tol);
  const GraphPoint gp(sys.cone, y, lambda, tol);
  const Vec target = w - sys.hess_apply(x, lambda, d);
  const Vec witness = concat(d, w);
  const Certificate srcq = srcq_check(sys, x, v, lambda, tol);

  const auto finish = [&](Certificate cert) {
    cert.assumed = {kAssumeSubregularG, "metric subregularity of Φ (removable)"};
    cert.checked = {"λ ∈ M_x(v)", "SRCQ: " + to_string(srcq.verdict)};
    return cert;
  };

  const double crit = c.dist(dy);
  if (crit > tol.membership * (1.0 + dy.norm())) {
    Certificate cert;
    cert.tol = tol;
    cert.verdict = Verdict::fails;
    cert.residual = crit;
    cert.witness = witness;
    cert.method = "critical cone test";
    cert.detail = "critical cone violation: dist(g'(x)d, C_K) = " + std::to_string(crit);
    out.route_a = finish(cert);
    if (route != Route::a) out.route_b = out.route_a;
    out.combined = out.route_a;
    return out;
  }
  if (route != Route::b) out.route_a = finish(route_a(gp, c, jt, dy, target, witness, tol));
  if (route != Route::a) out.route_b = finish(route_b(gp, jt, dy, target, witness, tol));
  if (route == Route::b) {
    out.combined = *out.route_b;
    out.route_a = *out.route_b;
    return out;
  }
  out.combined = out.route_a;
  if (out.route_b) {
    const Verdict va = out.route_a.verdict;
    const Verdict vb = out.route_b->verdict;
    out.routes_agree = !((va == Verdict::holds && vb == Verdict::fails) || (va == Verdict::fails && vb == Verdict::holds));
    out.combined.detail += "; route B: " + to_string(out.route_b->verdict) + " (" + out.route_b->detail + ")";
    if (!out.routes_agree) out.combined.detail += "; routes disagree";
  }
  if (!srcq.holds()) {
    out.combined.verdict = Verdict::inconclusive;
    out.combined.detail += "; SRCQ hypothesis not certified";
  }
  return out;
}

Certificate ngamma_graph_deriv_contains(const ConstraintSystem& sys, const Vec& x, const Vec& v,
                                        const Vec& lambda, const Vec& d, const Vec& w, const Tol& tol,
                                        Route route) {
  return ngamma_graph_deriv(sys, x, v, lambda, d, w, tol, route).combined;
}

}  // namespace conestab
