#include "conestab/geometry.hpp"
#include "conestab/repro.hpp"
#include "conestab/stability.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace conestab;
using conestab::testing::gaussian;
using conestab::testing::vec;

namespace {

GEProblem scalar_problem(const ConeDesc& k, double slope) {
  GEProblem p;
  p.sys = identity_system(k);
  p.f = affine_param_map(-Mat::Identity(1, 1), slope * Mat::Identity(1, 1), Vec::Zero(1));
  p.pbar = Vec::Zero(1);
  p.xbar = Vec::Zero(1);
  return p;
}

KktProblem scaled(const KktProblem& base, double f_scale, double g_scale) {
  KktProblem p = base;
  p.grad_f = [g = base.grad_f, f_scale](const Vec& z) { return Vec(f_scale * g(z)); };
  p.hess_f = [h = base.hess_f, f_scale](const Vec& z) { return Mat(f_scale * h(z)); };
  ConstraintSystem& c = p.constraint;
  c.value = [v = base.constraint.value, g_scale](const Vec& x) { return Vec(g_scale * v(x)); };
  c.jac_apply = [j = base.constraint.jac_apply, g_scale](const Vec& x, const Vec& h) { return Vec(g_scale * j(x, h)); };
  c.adj_apply = [a = base.constraint.adj_apply, g_scale](const Vec& x, const Vec& m) { return Vec(g_scale * a(x, m)); };
  c.hess_apply = [h = base.constraint.hess_apply, g_scale](const Vec& x, const Vec& l, const Vec& d) {
    return Vec(g_scale * h(x, l, d));
  };
  return p;
}

}  // namespace

TEST_SUITE("stability") {
  TEST_CASE("Phi residual") {
    const ConstraintSystem sys = section32_system();
    const auto [r0, r1] = phi_residual(sys, vec({0}), vec({0.5}), vec({0}));
    CHECK(r0.norm() == 0.0);
    CHECK(r1.norm() == 0.0);
    for (const double k : {10.0, 100.0}) {
      const auto [a, b] = phi_residual(sys, vec({1 / k}), vec({0.5}), vec({1 / k}));
      CHECK(a(0) == 0.0);
      CHECK(b(0) == doctest::Approx(1 / (k * k)).epsilon(1e-14));
    }
    const ConstraintSystem s1 = example1_system();
    const auto [g0, g1] = phi_residual(s1, example1_point(), example41_multiplier(), vec({-1, -1, 0}));
    CHECK(g0.norm() <= 1e-14);
    CHECK(g1.norm() <= 1e-14);
  }

  TEST_CASE("Phi subregularity probe") {
    const ConstraintSystem sys = section32_system();
    const PhiPoint center{vec({0}), vec({0.5}), vec({0})};
    std::vector<PhiPoint> seq;
    for (const double k : {100.0, 1000.0}) seq.push_back({vec({1 / k}), vec({0.5}), vec({1 / k})});
    const std::vector<double> r = phi_subregularity_probe(sys, center, seq, section32_phi_distance);
    CHECK(r[0] == doctest::Approx(7.0710678e-3).epsilon(1e-6));
    CHECK(r[1] == doctest::Approx(7.0710678e-4).epsilon(1e-6));
    CHECK(r[1] < r[0]);
    CHECK(r[1] / r[0] >= 0.05);
    CHECK(r[1] / r[0] <= 0.2);
    const std::vector<double> flat = phi_subregularity_probe(sys, center, {center, center}, section32_phi_distance);
    CHECK(flat == std::vector<double>{0.0, 0.0});
    CHECK_THROWS_AS(phi_subregularity_probe(sys, seq[0], seq, section32_phi_distance), PreconditionError);
  }

  TEST_CASE("direction net") {
    for (const int n : {2, 3, 5}) {
      const Mat a = direction_net(n, 40, 0);
      const Mat b = direction_net(n, 40, 0);
      CHECK(a == b);
      CHECK(a.rows() == n);
      for (int c = 0; c < a.cols(); ++c) CHECK(a.col(c).norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("isolated calmness") {
    const GEProblem ex41 = example41_problem();
    CHECK_NOTHROW(ex41.validate());
    const Certificate c = solution_map_isolated_calm(ex41, example41_multiplier());
    CHECK(c.holds());
    CHECK(solution_map_isolated_calm(ex41, example41_multiplier(), Tol{}.halved()).holds());

    GEProblem free;
    free.sys = identity_system(ConeDesc{FreeCone{2}});
    free.f = affine_param_map(Mat::Zero(2, 1), Mat::Zero(2, 2), Vec::Zero(2));
    free.pbar = Vec::Zero(1);
    free.xbar = Vec::Zero(2);
    const Certificate f = solution_map_isolated_calm(free, Vec::Zero(2));
    CHECK(f.fails());
    REQUIRE(f.witness);
    CHECK(f.witness->norm() > 0.0);

    CHECK(solution_map_isolated_calm(scalar_problem(ConeDesc{Orthant{1, Sign::minus}}, 1.0), vec({0})).holds());
    CHECK(solution_map_isolated_calm(scalar_problem(ConeDesc{Orthant{1, Sign::minus}}, 0.0), vec({0})).fails());
  }

  TEST_CASE("isolated calmness preconditions") {
    const GEProblem ex41 = example41_problem();
    const Certificate bad = solution_map_isolated_calm(ex41, Vec::Zero(4));
    CHECK(bad.verdict == Verdict::inconclusive);
    CHECK(bad.detail.find("preconditions unmet") != std::string::npos);
  }

  TEST_CASE("KKT isolated calmness") {
    CHECK(kkt_isolated_calm(kkt_lp_problem(), Vec::Zero(2), vec({1, 1})).holds());
    const Certificate deg = kkt_isolated_calm(kkt_lp_degenerate_problem(), Vec::Zero(1), vec({0.5, 0.5}));
    CHECK(deg.fails());
    REQUIRE(deg.witness);
    CHECK(deg.witness->tail(2).norm() > 0.0);
    CHECK(kkt_isolated_calm(kkt_trivial_problem(), Vec::Zero(2), Vec::Zero(1)).holds());
    CHECK_THROWS_AS(kkt_isolated_calm(kkt_lp_problem(), Vec::Zero(2), vec({1, 2})), PreconditionError);
  }

  TEST_CASE("KKT verdicts are invariant under scaling") {
    const std::vector<std::tuple<KktProblem, Vec, Vec>> cases{
        {kkt_lp_problem(), Vec::Zero(2), vec({1, 1})},
        {kkt_lp_degenerate_problem(), Vec::Zero(1), vec({0.5, 0.5})},
        {kkt_trivial_problem(), Vec::Zero(2), Vec::Zero(1)}};
    for (const auto& [p, z, lam] : cases) {
      const Verdict base = kkt_isolated_calm(p, z, lam).verdict;
      CHECK(kkt_isolated_calm(scaled(p, 2.0, 2.0), z, lam).verdict == base);
      CHECK(kkt_isolated_calm(scaled(p, 2.0, 1.0), z, Vec(2.0 * lam)).verdict == base);
    }
  }

  TEST_CASE("regular normal generator") {
    const ConstraintSystem sys = affine_system(ConeDesc{Orthant{1, Sign::plus}}, Mat::Identity(1, 1), Vec::Zero(1));
    const std::vector<NormalPair> zero = regular_normal_lower_generate(sys, vec({0}), vec({-1}), vec({-1}), vec({0}), 5, 1);
    REQUIRE_FALSE(zero.empty());
    for (const NormalPair& p : zero) CHECK(p.eta.norm() == 0.0);
    const std::vector<NormalPair> ns = regular_normal_lower_sample(sys, vec({0}), vec({-1}), vec({-1}), 20, 2);
    const std::vector<GraphTangent> ts = sample_graph_tangents(sys, vec({0}), vec({-1}), vec({-1}), 20, 3);
    REQUIRE(ns.size() == 20);
    REQUIRE(ts.size() == 20);
    for (const auto& n : ns) {
      for (const auto& t : ts) CHECK(n.xi.dot(t.d) + n.eta.dot(t.w) <= 1e-10);
    }
  }

  TEST_CASE("anti-alignment on the example1 system") {
    const ConstraintSystem sys = example1_system();
    const Vec x = example1_point();
    const std::vector<NormalPair> ns = regular_normal_lower_sample(sys, x, Vec::Zero(3), Vec::Zero(4), 10, 4);
    const std::vector<GraphTangent> ts = sample_graph_tangents(sys, x, Vec::Zero(3), Vec::Zero(4), 20, 5);
    REQUIRE(ns.size() == 10);
    REQUIRE(ts.size() == 20);
    for (const auto& n : ns) {
      for (const auto& t : ts) CHECK(n.xi.dot(t.d) + n.eta.dot(t.w) <= 1e-8);
    }
  }
}
