// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
#include "conestab/geometry.hpp"
#include "conestab/oracle.hpp"
#include "conestab/repro.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace conestab;
using conestab::testing::gaussian;
using conestab::testing::structured_point;
using conestab::testing::suite_cones;

namespace {

constexpr double kBudget1 = 1.0;
constexpr double kBudget2 = 2.0;
constexpr double kBudget3 = 2.0;
constexpr double kBudget4 = 10.0;
constexpr double kBudget6 = 30.0;
constexpr double kFdRelTol = 1e-4;
constexpr double kMoreauTol = 1e-10;
constexpr double kRatioTol = 1e-12;
constexpr double kAlignTol = 1e-8;
constexpr double kTangentResidual = 1e-6;  // graph residual/t below this: tangent
constexpr double kNormalResidual = 1e-3;   // graph residual/t above this: not tangent

struct Outcome {
  bool pass = false;
  std::string info;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  const ReproResult r = run_repro("example1");
  const double dt = seconds_since(t0);
  return {r.ok() && dt < kBudget1, "strict complementarity fails, normal-cone table matches, " + fmt(dt) + " s"};
}

Outcome criterion2() {
  const auto t0 = Clock::now();
  const ReproResult r = run_repro("example2");
  const double dt = seconds_since(t0);
  return {r.ok() && dt < kBudget2, "SRCQ holds at v̄, fails at v̂ with kernel witness, radial probes 10/10 each, " +
                                       fmt(dt) + " s"};
}

Outcome criterion3() {
  const auto t0 = Clock::now();
  const ConstraintSystem sys = example3_system();
  const Vec x = example3_point();
  const Vec v = example3_v();
  const Tol tol;
  const Certificate hinted = strict_complementarity_check(sys, x, v, tol, example3_ri_multiplier());
  const bool witness_ok = hinted.holds() && hinted.witness &&
                          (*hinted.witness - example3_ri_multiplier()).norm() <= 1e-12;
  const Certificate searched = strict_complementarity_check(sys, x, v, tol);
  const MultiplierSolveResult ms = multiplier_solve(sys, x, v, tol);
  int verified = 0;
  for (const Vec& m : ms.members) {
    const auto [aff, cone] = multiplier_residuals(sys, x, v, m, tol);
    if (aff <= tol.membership && cone <= tol.membership) ++verified;
  }
  bool distinct = false;
  for (std::size_t i = 0; i < ms.members.size(); ++i) {
    for (std::size_t j = i + 1; j < ms.members.size(); ++j) {
      distinct = distinct || (ms.members[i] - ms.members[j]).norm() > 1e-3;
    }
  }
  const double dt = seconds_since(t0);
  const bool pass = witness_ok && searched.holds() && verified >= 2 && distinct && dt < kBudget3;
  return {pass, "witness (0, diag(-1,0)) accepted, unhinted search " + to_string(searched.verdict) + ", " +
                    std::to_string(verified) + " verified members, " + fmt(dt) + " s"};
}

Outcome criterion4() {
  const auto t0 = Clock::now();
  const ReproResult r = run_repro("example41");
  const double dt = seconds_since(t0);
  return {r.ok() && dt < kBudget4,
          "SRCQ holds, nondegeneracy fails, isolated calmness holds at tol and tol/2, " + fmt(dt) + " s"};
}

Outcome criterion5() {
  const ConstraintSystem sys = section32_system();
  const PhiPoint center{Vec::Zero(1), Vec::Constant(1, 0.5), Vec::Zero(1)};
  bool exact = true;
  double worst = 0.0;
  std::vector<PhiPoint> seq;
  const std::vector<double> ks{10.0, 100.0, 1000.0};
  for (const double k : ks) {
    const PhiPoint p{Vec::Constant(1, 1.0 / k), Vec::Constant(1, 0.5), Vec::Constant(1, 1.0 / k)};
    const auto [first, second] = phi_residual(sys, p.x, p.lambda, p.v);
    exact = exact && first(0) == 0.0 && second(0) == p.x(0) * p.x(0) &&
            std::abs(second(0) - 1.0 / (k * k)) <= 1e-15 / (k * k) * 4.0;
    seq.push_back(p);
  }
  const std::vector<double> ratios = phi_subregularity_probe(sys, center, seq, section32_phi_distance);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    worst = std::max(worst, std::abs(ratios[i] - 1.0 / (std::sqrt(2.0) * ks[i])));
  }
  const bool last = std::abs(ratios[2] - 7.07e-4) <= 1e-6;
  return {exact && worst <= kRatioTol && last,
          "Phi = (0, 1/k^2) exactly, max ratio error " + fmt(worst) + ", ratio(1000) = " + fmt(ratios[2])};
}

Outcome criterion6() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(6);
  double worst = 0.0;
  for (const ConeDesc& k : suite_cones()) {
    for (int i = 0; i < 100; ++i) {
      const Vec z = gaussian(rng, k.dim());
      const Vec h = gaussian(rng, k.dim());
      const Vec exact = proj_dir_deriv(k, z, h);
      const Vec fd = fd_proj_deriv(k, z, h).value;
      const double scale = std::max(exact.norm(), fd.norm());
      if (scale > 0.0) worst = std::max(worst, (exact - fd).norm() / scale);
    }
  }
  const double dt = seconds_since(t0);
  return {worst <= kFdRelTol && dt < kBudget6, "max relative error " + fmt(worst) + ", " + fmt(dt) + " s"};
}

Outcome criterion7() {
  std::mt19937_64 rng(7);
  int disagreements = 0;
  int members = 0;
  int total = 0;
  const Tol tol;
  for (const ConeDesc& k : suite_cones()) {
    for (int i = 0; i < 100; ++i) {
      const GraphPoint gp = graph_sample(k, structured_point(k, rng));
      const Vec delta = gaussian(rng, k.dim());
      Vec dy = proj_dir_deriv(k, gp.z(), delta, tol);
      Vec dlam = delta - dy;
      if (i % 2 == 1) dlam += gaussian(rng, k.dim());
      const DnkResiduals r = dnk_residuals(gp, dy, dlam, tol);
      if (r.projection_ok != r.conditions_ok) ++disagreements;
      if (r.projection_ok) ++members;
      ++total;
    }
  }
  return {disagreements == 0, std::to_string(disagreements) + " disagreements over " + std::to_string(total) +
                                  " candidates (" + std::to_string(members) + " members)"};
}

Outcome criterion8() {
  std::mt19937_64 rng(8);
  double worst = 0.0;
  std::vector<ConeDesc> cones = suite_cones();
  cones.push_back(ConeDesc{Orthant{3, Sign::minus}, SecondOrder{3, Sign::minus}, Semidefinite{2, Sign::minus},
                          ZeroCone{2}, FreeCone{1}});
  for (const ConeDesc& k : cones) {
    const ConeDesc kp = k.polar();
    for (int i = 0; i < 1000; ++i) {
      const Vec z = 3.0 * gaussian(rng, k.dim());
      const Vec p = project(k, z);
      const Vec q = project(kp, z);
      worst = std::max({worst, (z - p - q).norm(), std::abs(p.dot(q))});
    }
  }
  return {worst <= kMoreauTol, "max decomposition/orthogonality residual " + fmt(worst)};
}

Outcome criterion9() {
  const ConstraintSystem sys = example1_system();
  const Vec x = example1_point();
  const Vec v = Vec::Zero(3);
  const Vec lam = Vec::Zero(4);
  const std::vector<GraphTangent> tangents = sample_graph_tangents(sys, x, v, lam, 25, 9);
  std::mt19937_64 rng(99);
  int disagreements = 0;
  int tangent_count = 0;
  int total = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    const GraphTangent& base = tangents[i % tangents.size()];
    Vec d = base.d;
    Vec w = base.w;
    if (i >= tangents.size()) w += gaussian(rng, 3);
    const Certificate c = ngamma_graph_deriv_contains(sys, x, v, lam, d, w);
    const std::vector<double> res = ngamma_graph_residual(sys, x, v, lam, d, w);
    const double scale = std::max(1.0, d.norm() + w.norm());
    const double hi = *std::max_element(res.begin(), res.end()) / scale;
    const double lo = *std::min_element(res.begin(), res.end()) / scale;
    const bool oracle_tangent = hi <= kTangentResidual;
    const bool oracle_normal = lo >= kNormalResidual;
    const bool agree = (c.holds() && oracle_tangent) || (c.fails() && oracle_normal);
    if (!agree) ++disagreements;
    if (oracle_tangent) ++tangent_count;
    ++total;
  }
  return {disagreements == 0 && total == 50, std::to_string(disagreements) + " disagreements over " +
                                                 std::to_string(total) + " pairs (" +
                                                 std::to_string(tangent_count) + " tangent)"};
}

Outcome criterion10() {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> dim_pick(2, 6);
  std::uniform_int_distribution<int> coord_pick(0, 3);
  int disagreements = 0;
  int trivial = 0;
  for (int i = 0; i < 50; ++i) {
    const int n = dim_pick(rng);
    CoordSet cs;
    for (int j = 0; j < n; ++j) cs.coords.push_back(static_cast<Coord>(coord_pick(rng)));
    std::uniform_int_distribution<int> ldim(1, n - 1);
    const int m = ldim(rng);
    Mat basis(n, m);
    for (int c = 0; c < m; ++c) basis.col(c) = gaussian(rng, n);
    if (i % 3 == 0) {
      // Plant a cone member in L so both outcomes are exercised.
      const ConeSet c = ConeSet::product({cs});
      basis.col(0) = c.project(gaussian(rng, n));
      if (basis.col(0).norm() < 1e-6) basis.col(0) = gaussian(rng, n);
    }
    const Certificate cert = subspace_cone_trivial(basis, ConeSet::product({cs}));
    const bool exact = polyhedral_trivial_exact(coord_generators(cs), basis);
    if (exact) ++trivial;
    if (cert.verdict == Verdict::inconclusive || cert.holds() != exact) ++disagreements;
  }
  return {disagreements == 0, std::to_string(disagreements) + " disagreements over 50 instances (" +
                                  std::to_string(trivial) + " trivial)"};
}

double worst_alignment(const ConstraintSystem& sys, const Vec& x, const Vec& v, const Vec& lam, int pairs,
                       int tangents, std::uint64_t seed) {
  const std::vector<NormalPair> ns = regular_normal_lower_sample(sys, x, v, lam, pairs, seed);
  const std::vector<GraphTangent> ts = sample_graph_tangents(sys, x, v, lam, tangents, seed + 1);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& n : ns) {
    for (const auto& t : ts) worst = std::max(worst, n.xi.dot(t.d) + n.eta.dot(t.w));
  }
  if (ns.size() < static_cast<std::size_t>(pairs) || ts.size() < static_cast<std::size_t>(tangents)) {
    return std::numeric_limits<double>::infinity();
  }
  return worst;
}

Outcome criterion11() {
  const double ex1 = worst_alignment(example1_system(), example1_point(), Vec::Zero(3), Vec::Zero(4), 20, 50, 11);
  // Orthant instance: g(x) = A x + b with inactive, strictly active and biactive coordinates.
  std::mt19937_64 rng(1111);
  Mat a(5, 3);
  for (int c = 0; c < 3; ++c) a.col(c) = gaussian(rng, 5);
  const Vec b = (Vec(5) << 1.5, 0.0, 0.0, 0.0, 2.0).finished();
  const ConstraintSystem sys = affine_system(ConeDesc{Orthant{5, Sign::plus}}, a, b);
  const Vec lam = (Vec(5) << 0.0, -1.0, -0.5, 0.0, 0.0).finished();
  const Vec x = Vec::Zero(3);
  const Vec v = a.transpose() * lam;
  const double orth = worst_alignment(sys, x, v, lam, 20, 50, 12);
  return {ex1 <= kAlignTol && orth <= kAlignTol,
          "max inner product " + fmt(ex1) + " (example1), " + fmt(orth) + " (orthant)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"example1 regression", criterion1},
      {"example2 regression", criterion2},
      {"example3 regression", criterion3},
      {"example41 regression", criterion4},
      {"section32 Phi regression", criterion5},
      {"Projection-derivative oracle equivalence", criterion6},
      {"DN_K route agreement", criterion7},
      {"Moreau and polarity suite", criterion8},
      {"Graphical-derivative referee", criterion9},
      {"Polyhedral triviality referee", criterion10},
      {"Anti-alignment", criterion11},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.info.c_str());
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
