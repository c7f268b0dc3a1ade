#include "conestab/constraint_system.hpp"
#include "conestab/geometry.hpp"
#include "conestab/oracle.hpp"
#include "conestab/repro.hpp"
#include "conestab/stability.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace conestab;
using conestab::testing::gaussian;
using conestab::testing::vec;

namespace {

Mat mat2(double a, double b, double c, double d) { return (Mat(2, 2) << a, b, c, d).finished(); }

Vec cat(const Vec& a, double t) {
  Vec out(a.size() + 1);
  out << a, t;
  return out;
}

ConstraintSystem random_quadratic(std::mt19937_64& rng) {
  const ConeDesc k{Semidefinite{2, Sign::plus}, Orthant{2, Sign::minus}};
  std::vector<Mat> qs;
  for (int i = 0; i < k.dim(); ++i) {
    Mat q(3, 3);
    for (int c = 0; c < 3; ++c) q.col(c) = gaussian(rng, 3);
    qs.push_back(q + q.transpose());
  }
  Mat a(k.dim(), 3);
  for (int c = 0; c < 3; ++c) a.col(c) = gaussian(rng, k.dim());
  return quadratic_system(k, qs, a, gaussian(rng, k.dim()));
}

void check_derivatives(const ConstraintSystem& sys, std::mt19937_64& rng) {
  const int n = sys.domain_dim();
  const int m = sys.range_dim();
  const double eps = 1e-6;
  for (int trial = 0; trial < 5; ++trial) {
    const Vec x = gaussian(rng, n);
    const Vec h = gaussian(rng, n);
    const Vec mu = gaussian(rng, m);
    const Vec fd = (sys.value(x + eps * h) - sys.value(x - eps * h)) / (2 * eps);
    CHECK((sys.jac_apply(x, h) - fd).norm() <= 1e-6 * (1.0 + fd.norm()));
    CHECK(std::abs(sys.jac_apply(x, h).dot(mu) - h.dot(sys.adj_apply(x, mu))) <= 1e-10 * (1.0 + h.norm() * mu.norm()));
    const Vec hfd = (sys.adj_apply(x + eps * h, mu) - sys.adj_apply(x - eps * h, mu)) / (2 * eps);
    CHECK((sys.hess_apply(x, mu, h) - hfd).norm() <= 1e-6 * (1.0 + hfd.norm()));
    CHECK((sys.jacobian(x) * h - sys.jac_apply(x, h)).norm() <= 1e-12 * (1.0 + h.norm()));
    CHECK((sys.hessian(x, mu) * h - sys.hess_apply(x, mu, h)).norm() <= 1e-12 * (1.0 + h.norm()));
  }
}

}  // namespace

TEST_SUITE("constraint_system") {
  TEST_CASE("derivative callbacks are consistent") {
    std::mt19937_64 rng(20);
    check_derivatives(example1_system(), rng);
    check_derivatives(example3_system(), rng);
    check_derivatives(section32_system(), rng);
    check_derivatives(random_quadratic(rng), rng);
    check_derivatives(affine_system(ConeDesc{SecondOrder{3}}, Mat::Random(3, 2), Vec::Random(3)), rng);
  }

  TEST_CASE("feasibility") {
    const ConstraintSystem sys = section32_system();
    CHECK_NOTHROW(require_feasible(sys, vec({0}), Tol{}));
    try {
      require_feasible(sys, vec({1}), Tol{});
      FAIL("expected a precondition error");
    } catch (const PreconditionError& e) {
      CHECK(std::string(e.what()).find("point infeasible: dist(g(x),K)=") == 0);
    }
  }

  TEST_CASE("tangent cone of the feasible set") {
    const ConstraintSystem sys = example1_system();
    const Vec x = example1_point();
    CHECK(gamma_tangent_contains(sys, x, Vec::Zero(3)));
    CHECK(gamma_tangent_contains(sys, x, vec({1, 2, 0.5})));
    CHECK_FALSE(gamma_tangent_contains(sys, x, vec({1, 2, -1})));
  }

  TEST_CASE("multiplier solve") {
    const ConstraintSystem sys = example1_system();
    const Vec x = example1_point();
    const MultiplierSolveResult zero = multiplier_solve(sys, x, Vec::Zero(3));
    REQUIRE(zero.found);
    CHECK(zero.lambda.norm() <= 1e-10);

    const MultiplierSolveResult ex41 = multiplier_solve(sys, x, vec({-1, -1, 0}));
    REQUIRE(ex41.found);
    CHECK((ex41.lambda - example41_multiplier()).norm() <= 1e-6);
    CHECK(ex41.uniqueness.holds());

    const MultiplierSolveResult pair = multiplier_solve(sys, x, vec({0, 0, -1}));
    REQUIRE(pair.found);
    CHECK((pair.lambda - cat(Vec::Zero(3), -1.0)).norm() <= 1e-6);

    CHECK(multiplier_solve(sys, x, vec({1, 0, 0})).existence.fails());

    const ConstraintSystem s3 = example3_system();
    const MultiplierSolveResult ms = multiplier_solve(s3, example3_point(), example3_v());
    REQUIRE(ms.found);
    CHECK(ms.uniqueness.fails());
    REQUIRE(ms.members.size() >= 2);
    for (const Vec& m : ms.members) {
      const auto [aff, cone] = multiplier_residuals(s3, example3_point(), example3_v(), m, Tol{});
      CHECK(aff <= 1e-8);
      CHECK(cone <= 1e-8);
    }
    const auto [aff, cone] = multiplier_residuals(s3, example3_point(), example3_v(), example3_ri_multiplier(), Tol{});
    CHECK(aff <= 1e-12);
    CHECK(cone <= 1e-12);
  }

  TEST_CASE("constraint qualifications") {
    const ConstraintSystem sys = example1_system();
    const Vec x = example1_point();
    CHECK(srcq_check(sys, x, Vec::Zero(3), Vec::Zero(4)).holds());
    const Certificate hat = srcq_check(sys, x, example2_vhat(), example2_lambda_hat());
    CHECK(hat.fails());
    REQUIRE(hat.witness);
    CHECK(sys.adj_apply(x, *hat.witness).norm() <= 1e-6 * hat.witness->norm());
    CHECK(nondegeneracy_check(sys, x).fails());
    CHECK(strict_complementarity_check(sys, x, Vec::Zero(3)).fails());

    const ConstraintSystem id = identity_system(ConeDesc{Orthant{3, Sign::plus}});
    CHECK(nondegeneracy_check(id, Vec::Zero(3)).holds());
    CHECK(srcq_check(id, Vec::Zero(3), vec({-1, -2, 0}), vec({-1, -2, 0})).holds());
  }

  TEST_CASE("SRCQ verdict is invariant under scaling") {
    const ConstraintSystem sys = example1_system();
    const Vec x = example1_point();
    const std::vector<std::pair<Vec, Vec>> pairs{{Vec::Zero(3), Vec::Zero(4)},
                                                 {example2_vhat(), example2_lambda_hat()},
                                                 {vec({-1, -1, 0}), example41_multiplier()}};
    for (const auto& [v, lam] : pairs) {
      CHECK(srcq_check(sys, x, v, lam).verdict == srcq_check(sys, x, 2.0 * v, 2.0 * lam).verdict);
    }
  }

  TEST_CASE("critical cone of the feasible set") {
    const ConstraintSystem sys = example1_system();
    const Vec x = example1_point();
    const Vec v = vec({-1, -1, 0});
    const Vec lam = example41_multiplier();
    CHECK(critical_cone_gamma_contains(sys, x, v, lam, Vec::Zero(3)));
    CHECK_FALSE(critical_cone_gamma_contains(sys, x, v, lam, vec({0, 0, -1})));
    CHECK_FALSE(critical_cone_gamma_contains(sys, x, v, lam, vec({1, 1, 0})));
    CHECK(critical_cone_gamma_contains(sys, x, Vec::Zero(3), Vec::Zero(4), vec({1, 2, 0})));
  }

  TEST_CASE("graphical derivative of the normal cone map of the feasible set") {
    const ConstraintSystem sys = example1_system();
    const Vec x = example1_point();
    const Vec v = Vec::Zero(3);
    const Vec lam = Vec::Zero(4);
    CHECK(ngamma_graph_deriv_contains(sys, x, v, lam, Vec::Zero(3), Vec::Zero(3)).holds());

    const Certificate bad = ngamma_graph_deriv_contains(sys, x, v, lam, vec({0, 0, -1}), Vec::Zero(3));
    CHECK(bad.fails());
    CHECK(bad.detail.find("critical cone violation") != std::string::npos);

    const ConeSet tn = tangent_of_normal(sys.cone, sys.value(x), lam);
    std::mt19937_64 rng(21);
    for (int i = 0; i < 10; ++i) {
      const Vec xi = tn.project(gaussian(rng, 4));
      const GraphDerivResult r = ngamma_graph_deriv(sys, x, v, lam, Vec::Zero(3), sys.adj_apply(x, xi));
      CHECK(r.combined.holds());
      CHECK(r.routes_agree);
    }
  }

  TEST_CASE("sampled graph tangents agree with the residual referee") {
    const ConstraintSystem sys = example1_system();
    const Vec x = example1_point();
    for (const GraphTangent& t : sample_graph_tangents(sys, x, Vec::Zero(3), Vec::Zero(4), 5, 3)) {
      CHECK(ngamma_graph_deriv_contains(sys, x, Vec::Zero(3), Vec::Zero(4), t.d, t.w).holds());
      const std::vector<double> res = ngamma_graph_residual(sys, x, Vec::Zero(3), Vec::Zero(4), t.d, t.w);
      CHECK(res.back() <= 1e-6 * std::max(1.0, t.d.norm() + t.w.norm()));
    }
  }

  TEST_CASE("cone range distance bounds") {
    const Mat jt = Mat::Identity(2, 2);
    const ConeSet s = ConeSet::product({CoordSet{{Coord::nonneg, Coord::nonneg}}});
    const ConeRangeDistance d = cone_range_distance(jt, s, vec({-3, 4}), Tol{});
    CHECK(d.upper == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(d.lower <= d.upper + 1e-12);
    CHECK(d.lower >= 3.0 - 1e-4);
  }

  TEST_CASE("invalid multiplier input") {
    const ConstraintSystem sys = example1_system();
    CHECK_THROWS_AS(require_multiplier(sys, example1_point(), Vec::Zero(3), cat(Vec::Zero(3), 1.0), Tol{}),
                    PreconditionError);
    CHECK_THROWS_AS(srcq_check(sys, example1_point(), Vec::Zero(3), Vec::Zero(2)), DimensionError);
  }
}
