#pragma once

#include "conestab/cone.hpp"

#include <Eigen/QR>

#include <initializer_list>
#include <random>
#include <vector>

namespace conestab::testing {

inline Vec vec(std::initializer_list<double> xs) {
  Vec out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (const double x : xs) out(i++) = x;
  return out;
}

inline Vec gaussian(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> nd;
  Vec out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = nd(rng);
  return out;
}

inline Mat random_orthogonal(std::mt19937_64& rng, int n) {
  Mat a(n, n);
  for (int i = 0; i < n; ++i) a.col(i) = gaussian(rng, n);
  return Eigen::HouseholderQR<Mat>(a).householderQ() * Mat::Identity(n, n);
}

/// The three primitive cones used by the property suites.
inline std::vector<ConeDesc> suite_cones() {
  return {ConeDesc{Orthant{5, Sign::plus}}, ConeDesc{SecondOrder{4}}, ConeDesc{Semidefinite{3, Sign::plus}}};
}

/// A point whose projection sits on a nontrivial face: zero coordinates,
/// SOC boundary or apex, and PSD spectra containing exact zeros.
inline Vec structured_point(const ConeDesc& k, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 2);
  Vec z(k.dim());
  for (std::size_t b = 0; b < k.size(); ++b) {
    const int off = k.offset(b);
    const int len = k.block_dim(b);
    Vec zb = gaussian(rng, len);
    if (const auto* s = std::get_if<SecondOrder>(&k.block(b)); s != nullptr && len > 1) {
      const int mode = pick(rng);
      const double r = zb.tail(len - 1).norm();
      if (mode == 0) zb(0) = r;                     // boundary, zero multiplier
      if (mode == 1) zb.setZero();                  // apex
      if (mode == 2) zb(0) = -r;                    // boundary of the polar
    } else if (const auto* p = std::get_if<Semidefinite>(&k.block(b))) {
      const int n = p->order;
      Vec ev = gaussian(rng, n);
      for (int i = 0; i < n; ++i) {
        if (pick(rng) == 0) ev(i) = 0.0;
      }
      const Mat q = random_orthogonal(rng, n);
      zb = svec(q * ev.asDiagonal() * q.transpose());
    } else {
      for (int i = 0; i < len; ++i) {
        if (pick(rng) == 0) zb(i) = 0.0;
      }
    }
    z.segment(off, len) = zb;
  }
  return z;
}

}  // namespace conestab::testing
