#include "conestab/cone_set.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace conestab;
using conestab::testing::gaussian;
using conestab::testing::vec;
using conestab::testing::structured_point;
using conestab::testing::suite_cones;

namespace {

Mat mat2(double a, double b, double c, double d) { return (Mat(2, 2) << a, b, c, d).finished(); }

Vec cat(const Vec& a, double t) {
  Vec out(a.size() + 1);
  out << a, t;
  return out;
}

std::vector<ConeDesc> all_sign_cones() {
  return {ConeDesc{Orthant{4, Sign::plus}},
          ConeDesc{Orthant{3, Sign::minus}},
          ConeDesc{SecondOrder{4}},
          ConeDesc{SecondOrder{3, Sign::minus}},
          ConeDesc{Semidefinite{3, Sign::plus}},
          ConeDesc{Semidefinite{2, Sign::minus}},
          ConeDesc{Semidefinite{2, Sign::plus}, Orthant{1, Sign::plus}, ZeroCone{2}, FreeCone{1}}};
}

}  // namespace

TEST_SUITE("cone_core") {
  TEST_CASE("projection closed forms") {
    CHECK(project(ConeDesc{Orthant{2, Sign::minus}}, vec({1, -3})).isApprox(vec({0, -3})));
    const Vec p = project(ConeDesc{Semidefinite{2, Sign::plus}}, svec(mat2(1, 0, 0, -1)));
    CHECK((p - svec(mat2(1, 0, 0, 0))).norm() <= 1e-14);
    const Vec s = project(ConeDesc{SecondOrder{3}}, vec({0, 1, 0}));
    CHECK((s - vec({0.5, 0.5, 0})).norm() <= 1e-15);
    CHECK(project(ConeDesc{ZeroCone{2}}, vec({3, 4})).norm() == 0.0);
    CHECK(project(ConeDesc{FreeCone{2}}, vec({3, 4})) == vec({3, 4}));
  }

  TEST_CASE("membership") {
    CHECK(contains(ConeDesc{Semidefinite{2, Sign::plus}}, Vec::Zero(3)));
    CHECK_FALSE(contains(ConeDesc{Orthant{1, Sign::minus}}, Vec::Constant(1, 1e-3)));
    const ConeDesc normal{Semidefinite{2, Sign::minus}, Orthant{1, Sign::minus}};
    CHECK(contains(normal, cat(svec(mat2(-1, 0, 0, 0)), -1.0)));
  }

  TEST_CASE("polar descriptions") {
    const ConeDesc k{Orthant{2, Sign::plus}, SecondOrder{3}, Semidefinite{2, Sign::minus}, ZeroCone{1}, FreeCone{2}};
    const ConeDesc kp = k.polar();
    CHECK(kp == ConeDesc{Orthant{2, Sign::minus}, SecondOrder{3, Sign::minus}, Semidefinite{2, Sign::plus},
                         FreeCone{1}, ZeroCone{2}});
    CHECK(kp.polar() == k);
  }

  TEST_CASE("Moreau decomposition and nonexpansiveness") {
    std::mt19937_64 rng(1);
    for (const ConeDesc& k : all_sign_cones()) {
      CAPTURE(k.describe());
      const ConeDesc kp = k.polar();
      for (int i = 0; i < 200; ++i) {
        const Vec z = 2.0 * gaussian(rng, k.dim());
        const Vec w = 2.0 * gaussian(rng, k.dim());
        const Vec p = project(k, z);
        const Vec q = project(kp, z);
        CHECK((z - p - q).norm() <= 1e-10);
        CHECK(std::abs(p.dot(q)) <= 1e-10);
        CHECK((project(k, p) - p).norm() <= 1e-12);
        CHECK((project(k, z) - project(k, w)).norm() <= (z - w).norm() + 1e-12);
        CHECK(contains(k, p));
      }
    }
  }

  TEST_CASE("eigen split for the PSD cone") {
    const ConeDesc k{Semidefinite{2, Sign::plus}};
    const Vec z = svec(mat2(1, 0, 0, -1));
    CHECK((project(k, z) - svec(mat2(1, 0, 0, 0))).norm() <= 1e-14);
    CHECK((project(k.polar(), z) - svec(mat2(0, 0, 0, -1))).norm() <= 1e-14);
  }

  TEST_CASE("svec is an isometry") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 20; ++i) {
      Mat a = Mat::Random(3, 3);
      Mat b = Mat::Random(3, 3);
      a = (a + a.transpose()).eval();
      b = (b + b.transpose()).eval();
      CHECK(std::abs(svec(a).dot(svec(b)) - (a * b).trace()) <= 1e-12);
      CHECK((smat(svec(a), 3) - a).norm() <= 1e-14);
    }
    CHECK_THROWS_AS(svec_order(5), std::invalid_argument);
  }

  TEST_CASE("tangent cone examples") {
    const ConeDesc k41{Semidefinite{2, Sign::plus}, Orthant{1, Sign::plus}};
    const ConeSet t41 = tangent_cone(k41, Vec::Zero(4));
    CHECK(t41.contains(cat(svec(Mat::Identity(2, 2)), 1.0)));
    CHECK_FALSE(t41.contains(cat(svec(Mat::Identity(2, 2)), -1.0)));

    const ConeSet t = tangent_cone(ConeDesc{Orthant{2, Sign::minus}}, vec({-1, 0}));
    CHECK(t.contains(vec({5, -3})));
    CHECK_FALSE(t.contains(vec({5, 1})));

    const ConeSet tp = tangent_cone(ConeDesc{Semidefinite{2, Sign::plus}}, svec(mat2(1, 0, 0, 0)));
    CHECK_FALSE(tp.contains(svec(mat2(0, 0, 0, -1))));
    CHECK(tp.contains(svec(mat2(-5, 1, 1, 0))));
  }

  TEST_CASE("tangent cone agrees with the distance quotient") {
    std::mt19937_64 rng(3);
    for (const ConeDesc& k : all_sign_cones()) {
      CAPTURE(k.describe());
      for (int i = 0; i < 40; ++i) {
        const Vec y = project(k, structured_point(k, rng));
        const Vec h = gaussian(rng, k.dim());
        const ConeSet t = tangent_cone(k, y);
        const double t0 = 1e-7;
        const double quotient = dist(k, y + t0 * h) / t0;
        if (t.contains(h)) CHECK(quotient <= 1e-4);
        else CHECK(t.dist(h) >= 1e-6);
        if (t.dist(h) > 1e-3) CHECK(quotient >= 0.5 * t.dist(h) - 1e-4);
      }
    }
  }

  TEST_CASE("normal cone examples") {
    const ConeDesc k41{Semidefinite{2, Sign::plus}, Orthant{1, Sign::plus}};
    const ConeSet n = normal_cone(k41, Vec::Zero(4));
    CHECK(n.contains(cat(svec(mat2(-1, 0, 0, 0)), -1.0)));
    CHECK_FALSE(n.contains(cat(svec(mat2(1, 0, 0, 0)), -1.0)));
    CHECK_FALSE(n.contains(cat(svec(mat2(-1, 0, 0, 0)), 1.0)));
    const ConeSet nf = normal_cone(ConeDesc{FreeCone{3}}, vec({1, 2, 3}));
    CHECK(nf.project(vec({4, 5, 6})).norm() == 0.0);
    const ConeSet ni = normal_cone(ConeDesc{SecondOrder{3}}, vec({2, 0.5, 0.5}));
    CHECK(ni.project(vec({4, 5, 6})).norm() <= 1e-14);
  }

  TEST_CASE("polarity of tangent and normal cones") {
    std::mt19937_64 rng(4);
    for (const ConeDesc& k : all_sign_cones()) {
      CAPTURE(k.describe());
      for (int i = 0; i < 20; ++i) {
        const Vec y = project(k, structured_point(k, rng));
        const ConeSet t = tangent_cone(k, y);
        const ConeSet n = normal_cone(k, y);
        for (int j = 0; j < 10; ++j) {
          const Vec z = gaussian(rng, k.dim());
          const Vec a = t.project(z);
          const Vec b = n.project(z);
          CHECK((z - a - b).norm() <= 1e-8);
          CHECK(std::abs(a.dot(b)) <= 1e-8);
        }
      }
    }
  }

  TEST_CASE("relative interior of the normal cone") {
    const ConeDesc k3{ZeroCone{3}, Semidefinite{2, Sign::plus}};
    const Vec y3 = (Vec(6) << Vec::Zero(3), svec(mat2(0, 0, 0, 1))).finished();
    const Vec l3 = (Vec(6) << Vec::Zero(3), svec(mat2(-1, 0, 0, 0))).finished();
    CHECK(ri_normal_contains(k3, y3, l3));
    const ConeDesc k1{Semidefinite{2, Sign::plus}, Orthant{1, Sign::plus}};
    CHECK_FALSE(ri_normal_contains(k1, Vec::Zero(4), Vec::Zero(4)));
    CHECK(ri_normal_contains(ConeDesc{Orthant{1, Sign::plus}}, Vec::Zero(1), Vec::Constant(1, -2.0)));
    CHECK_FALSE(ri_normal_contains(ConeDesc{Orthant{1, Sign::plus}}, Vec::Zero(1), Vec::Zero(1)));
    CHECK(ri_normal_contains(ConeDesc{SecondOrder{3}}, Vec::Zero(3), vec({-2, 0.5, 0})));
    CHECK_FALSE(ri_normal_contains(ConeDesc{SecondOrder{3}}, Vec::Zero(3), vec({-1, 1, 0})));
  }

  TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(project(ConeDesc{Orthant{2, Sign::plus}}, vec({1, 2, 3})), DimensionError);
    CHECK_THROWS_AS(tangent_cone(ConeDesc{Orthant{1, Sign::plus}}, Vec::Constant(1, -1.0)), PreconditionError);
    Vec bad = Vec::Zero(2);
    bad(0) = std::nan("");
    CHECK_THROWS(project(ConeDesc{Orthant{2, Sign::plus}}, bad));
  }
}
