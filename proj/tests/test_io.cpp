#include "conestab/json_io.hpp"
#include "conestab/oracle.hpp"
#include "conestab/repro.hpp"
#include "doctest.h"
#include "support.hpp"

#include <limits>

using namespace conestab;
using conestab::testing::gaussian;
using conestab::testing::vec;

TEST_SUITE("io") {
  TEST_CASE("cone JSON round trip") {
    const ConeDesc k{Orthant{2, Sign::minus}, SecondOrder{3}, SecondOrder{2, Sign::minus},
                     Semidefinite{3, Sign::plus}, ZeroCone{1}, FreeCone{4}};
    CHECK(cone_from_json(cone_to_json(k)) == k);
    CHECK(cone_from_json(R"({"product":[{"soc":{"dim":3}}]})") == ConeDesc{SecondOrder{3}});
  }

  TEST_CASE("dense conversion round trip") {
    std::mt19937_64 rng(30);
    const Layout layout{{true, 3}, {false, 2}, {true, 2}};
    const Vec v = gaussian(rng, layout_dim(layout));
    const std::vector<double> dense = to_dense(layout, v);
    CHECK(static_cast<int>(dense.size()) == dense_dim(layout));
    CHECK((from_dense(layout, dense) - v).norm() <= 1e-14);
  }

  TEST_CASE("certificate and report round trip") {
    Certificate c;
    c.verdict = Verdict::fails;
    c.residual = std::numeric_limits<double>::infinity();
    c.witness = vec({1, -2.5, 3});
    c.method = "test";
    c.assumed = {"a"};
    c.checked = {"b", "c"};
    c.detail = "x";
    CHECK(certificate_from_json(certificate_to_json(c)) == c);
    Report r{"analyze", {{"srcq", c}, {"other", Certificate{}}}, {"note"}};
    CHECK(report_from_json(report_to_json(r)) == r);
    CHECK(report_to_text(r).find("srcq") != std::string::npos);
  }

  TEST_CASE("problem files") {
    const ProblemSpec p = problem_from_json(read_file(CONESTAB_TEST_DATA "/example41.json"));
    REQUIRE(p.ge);
    const PointSpec& pt = p.points.at("xbar");
    REQUIRE(pt.lambda);
    CHECK((*pt.lambda - example41_multiplier()).norm() <= 1e-14);

    const ProblemSpec aff = problem_from_json(read_file(CONESTAB_TEST_DATA "/orthant_affine.json"));
    CHECK(aff.sys.range_dim() == 5);
    CHECK((aff.sys.value(vec({1, 2})) - vec({1, 3, 5, 1, 2})).norm() <= 1e-14);
  }

  TEST_CASE("input errors name the field") {
    try {
      problem_from_json(read_file(CONESTAB_TEST_DATA "/malformed.json"));
      FAIL("expected an input error");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
    try {
      problem_from_json(R"({"mapping":{"builtin":"example1"},"points":{"p":{"x":[1,2]}}})");
      FAIL("expected an input error");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("field 'problem.points.p.x'") != std::string::npos);
    }
    CHECK_THROWS_AS(cone_from_json(R"({"product":[{"cube":{"dim":2}}]})"), InputError);
  }

  TEST_CASE("repro scenarios") {
    for (const std::string& name : repro_names()) {
      CAPTURE(name);
      CHECK(run_repro(name).ok());
    }
    CHECK_THROWS_AS(run_repro("nope"), std::invalid_argument);
  }

  TEST_CASE("polyhedral referee") {
    const Mat gens = coord_generators(CoordSet{{Coord::nonneg, Coord::nonneg}});
    CHECK_FALSE(polyhedral_trivial_exact(gens, vec({1, 0})));
    CHECK(polyhedral_trivial_exact(gens, vec({1, -1})));
    CHECK_THROWS_AS(polyhedral_trivial_exact(Mat::Identity(9, 9), Mat::Identity(9, 1)), std::invalid_argument);
  }
}
