#include "conestab/stability.hpp"

#include "conestab/detail/overloaded.hpp"
#include "conestab/dykstra.hpp"
#include "conestab/geometry.hpp"
#include "conestab/polyhedral.hpp"
#include "conestab/proj_deriv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>

namespace conestab {

ParamMap affine_param_map(const Mat& a, const Mat& b, const Vec& c) {
  require_dim(a.rows(), c.size(), "parameter matrix rows");
  require_dim(b.rows(), c.size(), "state matrix rows");
  ParamMap f;
  f.value = [a, b, c](const Vec& p, const Vec& x) {
    require_dim(p.size(), a.cols(), "parameter");
    require_dim(x.size(), b.cols(), "state");
    return Vec(a * p + b * x + c);
  };
  f.deriv = [a, b](const Vec&, const Vec&, const Vec& dp, const Vec& dx) { return Vec(a * dp + b * dx); };
  return f;
}

Mat GEProblem::fx() const {
  const auto n = xbar.size();
  Mat out(n, n);
  const Vec dp = Vec::Zero(pbar.size());
  for (Eigen::Index i = 0; i < n; ++i) out.col(i) = f.deriv(pbar, xbar, dp, Vec::Unit(n, i));
  return out;
}

void GEProblem::validate(const Tol& tol) const {
  sys.validate();
  if (!f.value || !f.deriv) throw std::invalid_argument("base mapping has unset callbacks");
  require_dim(xbar.size(), sys.domain_dim(), "reference point");
  const Vec v = vbar();
  require_dim(v.size(), sys.domain_dim(), "F(p, x)");
  const MultiplierSolveResult ms = multiplier_solve(sys, xbar, v, tol, MultiplierSearch::existence_only);
  if (!ms.found) {
    std::ostringstream os;
    os << "reference point does not solve the generalized equation (" << ms.existence.detail << ")";
    throw PreconditionError(os.str());
  }
}

GEProblem example41_problem() {
  GEProblem g;
  g.sys = example1_system();
  g.f = affine_param_map(-Mat::Identity(3, 3), -Mat::Identity(3, 3), Vec::Zero(3));
  g.pbar = Vec::Zero(3);
  g.xbar = (Vec(3) << -1.0, -1.0, 0.0).finished();
  return g;
}

std::pair<Vec, Vec> phi_residual(const ConstraintSystem& sys, const Vec& x, const Vec& lambda, const Vec& v) {
  require_dim(x.size(), sys.domain_dim(), "x");
  require_dim(v.size(), sys.domain_dim(), "v");
  require_dim(lambda.size(), sys.range_dim(), "lambda");
  const Vec gx = sys.value(x);
  return {Vec(-v + sys.adj_apply(x, lambda)), Vec(gx - project(sys.cone, Vec(gx + lambda)))};
}

namespace {

double phi_norm(const ConstraintSystem& sys, const PhiPoint& p) {
  const auto [first, second] = phi_residual(sys, p.x, p.lambda, p.v);
  return std::hypot(first.norm(), second.norm());
}

}  // namespace

std::vector<double> phi_subregularity_probe(const ConstraintSystem& sys, const PhiPoint& center,
                                            const std::vector<PhiPoint>& sequence, const PhiDistance& dist,
                                            const Tol& tol) {
  tol.validate();
  const double at_center = phi_norm(sys, center);
  if (at_center > tol.membership) {
    std::ostringstream os;
    os << "center is not a zero of Phi: |Phi| = " << at_center;
    throw PreconditionError(os.str());
  }
  std::vector<double> out;
  out.reserve(sequence.size());
  for (const auto& p : sequence) {
    const double num = phi_norm(sys, p);
    const double den = dist(p);
    if (den <= 0.0) {
      out.push_back(num <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    } else {
      out.push_back(num / den);
    }
  }
  return out;
}

double section32_phi_distance(const PhiPoint& p) {
  // Φ⁻¹(0, 0) = {0} × R₊ × {0}
  const double lam_gap = p.lambda.size() > 0 ? std::min(0.0, p.lambda(0)) : 0.0;
  return std::sqrt(p.x.squaredNorm() + p.v.squaredNorm() + lam_gap * lam_gap);
}

std::uint64_t env_seed() {
  const char* s = std::getenv("CONESTAB_SEED");
  if (s == nullptr || *s == '\0') return 0;
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    return 0;
  }
}

Mat direction_net(int n, int count, std::uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("direction net needs a positive dimension");
  count = std::max(count, 1);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double shift = std::fmod(static_cast<double>(seed) * 0.6180339887498949, 1.0);
  Mat out(n, count);
  if (n == 1) {
    for (int i = 0; i < count; ++i) out(0, i) = i % 2 == 0 ? 1.0 : -1.0;
    return out;
  }
  if (n == 2) {
    for (int i = 0; i < count; ++i) {
      const double a = two_pi * (i + shift) / count;
      out.col(i) << std::cos(a), std::sin(a);
    }
    return out;
  }
  if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = golden * i + two_pi * shift;
      out.col(i) << r * std::cos(a), r * std::sin(a), z;
    }
    return out;
  }
  // Kronecker sequence pushed through Box-Muller, then normalized.
  const int pairs = (n + 1) / 2;
  std::vector<double> alpha(static_cast<std::size_t>(2 * pairs));
  const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    const double p = k < std::size(primes) ? primes[k] : 73.0 + 2.0 * static_cast<double>(k);
    alpha[k] = std::fmod(std::sqrt(p), 1.0);
  }
  for (int i = 0; i < count; ++i) {
    Vec g(2 * pairs);
    for (int k = 0; k < pairs; ++k) {
      const double u1 = std::fmod((i + 1) * alpha[2 * k] + shift, 1.0);
      const double u2 = std::fmod((i + 1) * alpha[2 * k + 1] + shift, 1.0);
      const double rad = std::sqrt(-2.0 * std::log(std::max(u1, 1e-300)));
      g(2 * k) = rad * std::cos(two_pi * u2);
      g(2 * k + 1) = rad * std::sin(two_pi * u2);
    }
    Vec d = g.head(n);
    const double norm = d.norm();
    out.col(i) = norm > 0.0 ? Vec(d / norm) : Vec(Vec::Unit(n, i % n));
  }
  return out;
}

namespace {

/// Linearized data of the isolated-calmness inclusion at (p̄, x̄, λ̄).
struct CalmData {
  ConeDesc cone;
  Vec y;
  Vec lambda;
  Mat a;   // F'_x + ∇²<λ̄, g>
  Mat j;   // g'(x̄)
  double scale = 1.0;
};

CalmData calm_data(const GEProblem& problem, const Vec& lambda) {
  CalmData d;
  d.cone = problem.sys.cone;
  d.y = problem.sys.value(problem.xbar);
  d.lambda = lambda;
  d.j = problem.sys.jacobian(problem.xbar);
  d.a = problem.fx() + problem.sys.hessian(problem.xbar, lambda);
  d.scale = std::max({1.0, d.a.norm(), d.j.norm()});
  return d;
}

struct CalmResidual {
  double upper = 0.0;
  double lower = 0.0;
};

CalmResidual calm_residual(const CalmData& d, const GraphPoint& gp, const ConeSet& crit, const Vec& dx,
                           const Tol& tol) {
  const Vec dy = d.j * dx;
  const Vec dyc = crit.project(dy);
  const double r1 = (dy - dyc).norm();
  const Vec r = -d.a * dx - 0.5 * d.j.transpose() * sigma_form_grad(gp, dyc);
  const ConeSet face = normal_of_critical(crit, dyc, tol);
  const ConeRangeDistance rd = cone_range_distance(d.j.transpose(), face, r, tol);
  return {r1 + rd.upper, r1 + rd.lower};
}

enum class CoordKind { free_y, fixed_y, biactive, skip };

struct CoordInfo {
  CoordKind kind = CoordKind::skip;
  double sign = 1.0;  // orthant orientation for biactive coordinates
};

/// Per-coordinate description of K when every block is a product of lines, rays and points.
std::optional<std::vector<CoordInfo>> coordinate_structure(const CalmData& d, const Tol& tol) {
  std::vector<CoordInfo> out(static_cast<std::size_t>(d.cone.dim()));
  const double thr = zero_threshold(tol, std::max(d.y.norm(), d.lambda.norm())) + tol.membership;
  for (std::size_t b = 0; b < d.cone.size(); ++b) {
    const int off = d.cone.offset(b);
    const int len = d.cone.block_dim(b);
    std::optional<double> orth;
    bool ok = true;
    std::visit(detail::overloaded{
                   [&](const Orthant& o) { orth = sign_factor(o.sign); },
                   [&](const Semidefinite& s) {
                     if (s.order == 1) orth = sign_factor(s.sign);
                     else ok = false;
                   },
                   [&](const SecondOrder& s) {
                     if (s.dim == 1) orth = sign_factor(s.sign);
                     else ok = false;
                   },
                   [&](const ZeroCone&) {
                     for (int i = 0; i < len; ++i) out[static_cast<std::size_t>(off + i)].kind = CoordKind::fixed_y;
                   },
                   [&](const FreeCone&) {
                     for (int i = 0; i < len; ++i) out[static_cast<std::size_t>(off + i)].kind = CoordKind::free_y;
                   },
               },
               d.cone.block(b));
    if (!ok) return std::nullopt;
    if (!orth) continue;
    for (int i = 0; i < len; ++i) {
      auto& c = out[static_cast<std::size_t>(off + i)];
      const double s = *orth;
      c.sign = s;
      if (s * d.y(off + i) > thr) c.kind = CoordKind::free_y;
      else if (std::abs(d.lambda(off + i)) > thr) c.kind = CoordKind::fixed_y;
      else c.kind = CoordKind::biactive;
    }
  }
  return out;
}

Certificate enumerate_faces(const CalmData& d, const std::vector<CoordInfo>& coords, const Tol& tol) {
  const auto n = d.j.cols();
  const auto m = d.j.rows();
  std::vector<Eigen::Index> bi;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (coords[static_cast<std::size_t>(i)].kind == CoordKind::biactive) bi.push_back(i);
  }
  Certificate cert;
  cert.tol = tol;
  constexpr std::size_t kMaxBiactive = 16;
  if (bi.size() > kMaxBiactive) {
    cert.verdict = Verdict::inconclusive;
    cert.detail = "too many biactive coordinates for face enumeration: " + std::to_string(bi.size());
    return cert;
  }
  const std::size_t pieces = std::size_t{1} << bi.size();
  cert.method = "face enumeration of the critical-cone graph over " + std::to_string(pieces) + " piece(s)";
  const auto row_y = [&](Eigen::Index i, double s) {
    Vec r = Vec::Zero(n + m);
    r.head(n) = s * d.j.row(i).transpose();
    return r;
  };
  const auto row_mu = [&](Eigen::Index i, double s) {
    Vec r = Vec::Zero(n + m);
    r(n + i) = s;
    return r;
  };
  double worst = 0.0;
  for (std::size_t piece = 0; piece < pieces; ++piece) {
    std::vector<Vec> eq;
    std::vector<Vec> ineq;
    for (Eigen::Index r = 0; r < n; ++r) {
      Vec row(n + m);
      row << d.a.row(r).transpose(), d.j.col(r);
      eq.push_back(row);
    }
    std::size_t bit = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const CoordInfo& c = coords[static_cast<std::size_t>(i)];
      switch (c.kind) {
        case CoordKind::free_y:
          eq.push_back(row_mu(i, 1.0));
          break;
        case CoordKind::fixed_y:
          eq.push_back(row_y(i, 1.0));
          break;
        case CoordKind::biactive:
          if (((piece >> bit) & 1U) == 0U) {
            ineq.push_back(row_y(i, c.sign));
            eq.push_back(row_mu(i, 1.0));
          } else {
            eq.push_back(row_y(i, 1.0));
            ineq.push_back(row_mu(i, -c.sign));
          }
          ++bit;
          break;
        case CoordKind::skip:
          break;
      }
    }
    const auto stack = [&](const std::vector<Vec>& rows) {
      Mat out(static_cast<Eigen::Index>(rows.size()), n + m);
      for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
      return out;
    };
    const ConeGenerators gens = dd_generators(stack(ineq), stack(eq));
    for (const Mat* set : {&gens.lineality, &gens.rays}) {
      for (Eigen::Index k = 0; k < set->cols(); ++k) {
        const Vec u = set->col(k).normalized();
        const double dxn = u.head(n).norm();
        worst = std::max(worst, dxn);
        if (dxn > 1e-7) {
          cert.verdict = Verdict::fails;
          cert.witness = Vec(u.head(n) / dxn);
          cert.residual = 0.0;
          std::ostringstream os;
          os << "piece " << piece << " admits a nonzero direction with multiplier change |μ| = "
             << u.tail(m).norm() / dxn;
          cert.detail = os.str();
          return cert;
        }
      }
    }
  }
  cert.verdict = Verdict::holds;
  cert.residual = worst;
  cert.detail = "every piece forces Δx = 0";
  return cert;
}

Tol inner_tol(const Tol& tol) {
  Tol t = tol;
  t.max_iter = std::min(tol.max_iter, 3000);
  return t;
}

}  // namespace

double isolated_calm_residual(const GEProblem& problem, const Vec& lambda, const Vec& dx, const Tol& tol) {
  require_dim(dx.size(), problem.sys.domain_dim(), "direction");
  const CalmData d = calm_data(problem, lambda);
  const GraphPoint gp(d.cone, d.y, lambda, tol);
  const ConeSet crit = critical_cone(d.cone, d.y, lambda, tol);
  return calm_residual(d, gp, crit, dx, tol).upper;
}

Certificate solution_map_isolated_calm(const GEProblem& problem, const Vec& lambda, const Tol& tol,
                                       const NetOptions& net) {
  tol.validate();
  problem.sys.validate();
  Certificate cert;
  cert.tol = tol;
  cert.assumed = {"metric subregularity of G(x) = g(x) - K at x̄"};
  const Vec v = problem.vbar();
  Certificate srcq;
  try {
    srcq = srcq_check(problem.sys, problem.xbar, v, lambda, tol);
  } catch (const PreconditionError& e) {
    cert.method = "preconditions";
    cert.detail = std::string("preconditions unmet: ") + e.what();
    return cert;
  }
  cert.checked = {"λ̄ ∈ M_x̄(v̄)"};
  if (!srcq.holds()) {
    cert.method = "preconditions";
    cert.detail = "preconditions unmet: SRCQ at x̄ w.r.t. λ̄ is " + to_string(srcq.verdict);
    return cert;
  }
  cert.checked.emplace_back("SRCQ at x̄ w.r.t. λ̄");

  const CalmData d = calm_data(problem, lambda);
  if (const auto coords = coordinate_structure(d, tol)) {
    Certificate e = enumerate_faces(d, *coords, tol);
    e.assumed = cert.assumed;
    e.checked = cert.checked;
    return e;
  }

  const Tol itol = inner_tol(tol);
  const GraphPoint gp(d.cone, d.y, lambda, tol);
  const ConeSet crit = critical_cone(d.cone, d.y, lambda, tol);
  const auto n = static_cast<int>(d.j.cols());
  const int count = (1 << std::clamp(net.refinement, 0, 16)) * (n + 1);
  const std::uint64_t seed = net.seed != 0 ? net.seed : env_seed();
  Mat dirs(n, count + 2 * n);
  dirs.leftCols(count) = direction_net(n, count, seed);
  for (int i = 0; i < n; ++i) {
    dirs.col(count + 2 * i) = Vec::Unit(n, i);
    dirs.col(count + 2 * i + 1) = -Vec::Unit(n, i);
  }
  const double margin = std::sqrt(tol.membership);
  const double refute = tol.membership * d.scale;

  std::vector<CalmResidual> res(static_cast<std::size_t>(dirs.cols()));
  for (Eigen::Index k = 0; k < dirs.cols(); ++k) {
    res[static_cast<std::size_t>(k)] = calm_residual(d, gp, crit, dirs.col(k), itol);
  }
  double min_lower = std::numeric_limits<double>::infinity();
  for (const auto& r : res) min_lower = std::min(min_lower, r.lower);

  std::ostringstream os;
  os << "direction net of " << dirs.cols() << " points, margin " << margin;
  cert.method = os.str();
  if (min_lower >= margin) {
    cert.verdict = Verdict::holds;
    cert.residual = min_lower;
    cert.detail = "minimum certified residual over the net " + std::to_string(min_lower);
    return cert;
  }

  // Local compass search on the sphere from the most promising net points.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(dirs.cols()));
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<Eigen::Index>(k);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return res[static_cast<std::size_t>(a)].upper < res[static_cast<std::size_t>(b)].upper;
  });
  double best = std::numeric_limits<double>::infinity();
  Vec best_dir;
  const int starts = std::min<int>(std::max(net.refine_starts, 1), static_cast<int>(order.size()));
  for (int s = 0; s < starts; ++s) {
    Vec cur = dirs.col(order[static_cast<std::size_t>(s)]);
    double val = res[static_cast<std::size_t>(order[static_cast<std::size_t>(s)])].upper;
    double step = 0.1;
    int evals = 0;
    while (step > 1e-9 && evals < 400 && val > refute) {
      bool improved = false;
      for (int i = 0; i < n && !improved; ++i) {
        for (const double sgn : {1.0, -1.0}) {
          const Vec trial = (cur + sgn * step * Vec::Unit(n, i)).normalized();
          const double tv = calm_residual(d, gp, crit, trial, itol).upper;
          ++evals;
          if (tv < val) {
            cur = trial;
            val = tv;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (val < best) {
      best = val;
      best_dir = cur;
    }
    if (best <= refute) break;
  }
  if (best <= refute) {
    cert.verdict = Verdict::fails;
    cert.residual = best;
    cert.witness = best_dir;
    cert.detail = "unit direction satisfies the linearized inclusion";
    return cert;
  }
  cert.verdict = Verdict::inconclusive;
  cert.residual = std::min(best, min_lower);
  os.str("");
  os << "no counterexample found; net size " << dirs.cols() << ", minimum certified residual " << min_lower
     << " below margin " << margin << ", best local residual " << best;
  cert.detail = os.str();
  return cert;
}

GEProblem kkt_as_ge(const KktProblem& problem, const Vec& zbar, const Vec& lambdabar) {
  const ConstraintSystem& g = problem.constraint;
  g.validate();
  if (!problem.grad_f || !problem.hess_f) throw std::invalid_argument("objective has unset callbacks");
  const int n = problem.n;
  require_dim(zbar.size(), n, "primal point");
  require_dim(g.domain_dim(), n, "constraint domain");
  const ConeDesc mcone = problem.multiplier_cone();
  const int m = mcone.dim();
  require_dim(lambdabar.size(), m, "multiplier");
  GEProblem ge;
  ge.sys = identity_system(concat(ConeDesc{FreeCone{n}}, mcone));
  ge.sys.name = "kkt";
  ge.pbar = Vec::Zero(n + m);
  ge.xbar = Vec(n + m);
  ge.xbar << zbar, lambdabar;
  const auto grad_f = problem.grad_f;
  const auto hess_f = problem.hess_f;
  ge.f.value = [g, grad_f, n, m](const Vec& p, const Vec& x) {
    const Vec z = x.head(n);
    const Vec lam = x.tail(m);
    Vec out(n + m);
    out << grad_f(z) - p.head(n) + g.adj_apply(z, lam), -g.value(z) + p.tail(m);
    return out;
  };
  ge.f.deriv = [g, hess_f, n, m](const Vec& p, const Vec& x, const Vec& dp, const Vec& dx) {
    (void)p;
    const Vec z = x.head(n);
    const Vec lam = x.tail(m);
    const Vec dz = dx.head(n);
    Vec out(n + m);
    out << hess_f(z) * dz + g.hess_apply(z, lam, dz) + g.adj_apply(z, dx.tail(m)) - dp.head(n),
        -g.jac_apply(z, dz) + dp.tail(m);
    return out;
  };
  return ge;
}

Certificate kkt_isolated_calm(const KktProblem& problem, const Vec& zbar, const Vec& lambdabar, const Tol& tol,
                              const NetOptions& net) {
  tol.validate();
  const GEProblem ge = kkt_as_ge(problem, zbar, lambdabar);
  const Vec v = ge.vbar();
  const int n = problem.n;
  const double scale = std::max(1.0, ge.xbar.norm());
  const double grad_res = v.head(n).norm();
  const double dual_res = dist(problem.multiplier_cone(), lambdabar);
  const double comp = normal_cone(ge.sys.cone, ge.xbar, tol).dist(v);
  if (grad_res > tol.membership * scale || dual_res > tol.membership * scale || comp > tol.membership * scale) {
    std::ostringstream os;
    os << "not a KKT pair: |grad L| = " << grad_res << ", dist(lambda, M) = " << dual_res
       << ", complementarity residual = " << comp;
    throw PreconditionError(os.str());
  }
  Certificate cert = solution_map_isolated_calm(ge, v, tol, net);
  cert.checked.insert(cert.checked.begin(), "(z̄, λ̄) is a KKT pair");
  return cert;
}

namespace {

Vec gaussian(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> nd;
  Vec out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = nd(rng);
  return out;
}

struct LocalGeometry {
  Mat j;
  Mat h;
  GraphPoint gp;
  ConeSet crit;
  ConeSet crit_polar;
  Mat range;  // orthonormal basis of range g'(x)
};

LocalGeometry local_geometry(const ConstraintSystem& sys, const Vec& x, const Vec& v, const Vec& lambda,
                             const Tol& tol) {
  require_multiplier(sys, x, v, lambda, tol);
  const Vec y = sys.value(x);
  const Mat j = sys.jacobian(x);
  ConeSet crit = critical_cone(sys.cone, y, lambda, tol);
  ConeSet pol = crit.polar();
  return {j, sys.hessian(x, lambda), GraphPoint(sys.cone, y, lambda, tol), crit, pol,
          rank_info(j, tol.zero).range};
}

/// A direction d with g'(x)d in the critical cone, or nullopt when the sample lands off it.
std::optional<Vec> critical_direction(const LocalGeometry& lg, std::mt19937_64& rng, const Tol& tol) {
  const Vec start = gaussian(rng, lg.j.rows());
  const auto onto_range = [&lg](const Vec& z) { return project_span(lg.range, z); };
  const auto onto_crit = [&lg](const Vec& z) { return lg.crit.project(z); };
  // Tight inner tolerance: the anti-alignment identity is sensitive to dist(g'(x)d, C).
  const Tol tight{std::min(tol.membership, 1e-12), std::min(tol.zero, 1e-13), std::max(tol.max_iter, 20000)};
  const DykstraResult r = dykstra(onto_crit, onto_range, start, tight);
  const Vec d = lg.j.completeOrthogonalDecomposition().solve(r.point);
  const Vec dy = lg.j * d;
  if (lg.crit.dist(dy) > 1e2 * tight.membership * std::max(1.0, dy.norm())) return std::nullopt;
  return d;
}

}  // namespace

std::vector<NormalPair> regular_normal_lower_generate(const ConstraintSystem& sys, const Vec& x, const Vec& v,
                                                      const Vec& lambda, const Vec& eta, int count,
                                                      std::uint64_t seed, const Tol& tol) {
  tol.validate();
  require_dim(eta.size(), sys.domain_dim(), "eta");
  const LocalGeometry lg = local_geometry(sys, x, v, lambda, tol);
  const Vec b = lg.j * eta;
  std::vector<NormalPair> out;
  if (!lg.crit.contains(b, tol)) return out;
  const Vec half_grad = 0.5 * sigma_form_grad(lg.gp, b);
  std::mt19937_64 rng(seed);
  for (int k = 0; k < count; ++k) {
    const Vec a = lg.crit_polar.project(gaussian(rng, lg.j.rows()));
    const Vec mu = a - half_grad;
    out.push_back({Vec(-lg.h * eta + lg.j.transpose() * mu), eta});
  }
  return out;
}

std::vector<NormalPair> regular_normal_lower_sample(const ConstraintSystem& sys, const Vec& x, const Vec& v,
                                                    const Vec& lambda, int count, std::uint64_t seed,
                                                    const Tol& tol) {
  const LocalGeometry lg = local_geometry(sys, x, v, lambda, tol);
  std::mt19937_64 rng(seed);
  std::vector<NormalPair> out;
  for (int attempt = 0; attempt < 4 * count && static_cast<int>(out.size()) < count; ++attempt) {
    // Alternate the zero slice η = 0 with sampled critical directions.
    Vec eta = Vec::Zero(lg.j.cols());
    if (attempt % 4 != 0) {
      const auto d = critical_direction(lg, rng, tol);
      if (!d) continue;
      eta = *d;
    }
    const auto pairs = regular_normal_lower_generate(sys, x, v, lambda, eta, 1, rng(), tol);
    out.insert(out.end(), pairs.begin(), pairs.end());
  }
  return out;
}

std::vector<GraphTangent> sample_graph_tangents(const ConstraintSystem& sys, const Vec& x, const Vec& v,
                                                const Vec& lambda, int count, std::uint64_t seed,
                                                const Tol& tol) {
  tol.validate();
  const LocalGeometry lg = local_geometry(sys, x, v, lambda, tol);
  std::mt19937_64 rng(seed);
  std::vector<GraphTangent> out;
  for (int attempt = 0; attempt < 4 * count && static_cast<int>(out.size()) < count; ++attempt) {
    const auto d = critical_direction(lg, rng, tol);
    if (!d) continue;
    const Vec dy = lg.crit.project(lg.j * *d);
    const ConeSet face = normal_of_critical(lg.crit, dy, tol);
    const Vec n = face.project(gaussian(rng, lg.j.rows()));
    const Vec dlam = 0.5 * sigma_form_grad(lg.gp, dy) + n;
    out.push_back({*d, Vec(lg.h * *d + lg.j.transpose() * dlam)});
  }
  return out;
}

}  // namespace conestab
