#pragma once

#include "conestab/linalg.hpp"

#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

namespace conestab {

enum class Sign { plus, minus };

constexpr Sign flip(Sign s) { return s == Sign::plus ? Sign::minus : Sign::plus; }
constexpr double sign_factor(Sign s) { return s == Sign::plus ? 1.0 : -1.0; }

struct Orthant {
  int dim = 1;
  Sign sign = Sign::plus;
  friend bool operator==(const Orthant&, const Orthant&) = default;
};

/// Second-order cone {(t, u) : |u| <= t} with t the first coordinate; minus is its negative.
struct SecondOrder {
  int dim = 1;
  Sign sign = Sign::plus;
  friend bool operator==(const SecondOrder&, const SecondOrder&) = default;
};

/// Positive (plus) or negative (minus) semidefinite cone of order n.
struct Semidefinite {
  int order = 1;
  Sign sign = Sign::plus;
  friend bool operator==(const Semidefinite&, const Semidefinite&) = default;
};

struct ZeroCone {
  int dim = 1;
  friend bool operator==(const ZeroCone&, const ZeroCone&) = default;
};

struct FreeCone {
  int dim = 1;
  friend bool operator==(const FreeCone&, const FreeCone&) = default;
};

using PrimitiveCone = std::variant<Orthant, SecondOrder, Semidefinite, ZeroCone, FreeCone>;

int ambient_dim(const PrimitiveCone& c);
PrimitiveCone polar(const PrimitiveCone& c);
bool is_polyhedral(const PrimitiveCone& c);
std::string describe(const PrimitiveCone& c);

/// Tolerances shared by every decision procedure.
struct Tol {
  double membership = 1e-8;
  double zero = 1e-9;
  int max_iter = 10000;

  void validate() const;
  Tol halved() const { return {membership / 2, zero / 2, max_iter}; }
  friend bool operator==(const Tol&, const Tol&) = default;
};

/// Threshold below which an eigenvalue (or coordinate) at scale `scale` counts as zero.
inline double zero_threshold(const Tol& tol, double scale) {
  return tol.zero * (scale > 1.0 ? scale : 1.0);
}

/// A product of primitive cones; the ambient vector is the concatenation of the blocks.
class ConeDesc {
 public:
  ConeDesc() = default;
  ConeDesc(std::initializer_list<PrimitiveCone> blocks);
  explicit ConeDesc(std::vector<PrimitiveCone> blocks);

  const std::vector<PrimitiveCone>& blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.size(); }
  const PrimitiveCone& block(std::size_t b) const { return blocks_.at(b); }
  int offset(std::size_t b) const { return offsets_.at(b); }
  int block_dim(std::size_t b) const { return offsets_.at(b + 1) - offsets_.at(b); }
  int dim() const { return offsets_.back(); }

  ConeDesc polar() const;
  bool polyhedral() const;
  std::string describe() const;

  friend bool operator==(const ConeDesc& a, const ConeDesc& b) { return a.blocks_ == b.blocks_; }

 private:
  std::vector<PrimitiveCone> blocks_;
  std::vector<int> offsets_{0};
};

ConeDesc concat(const ConeDesc& a, const ConeDesc& b);

/// A point of the ambient space of a ConeDesc.
using AmbientVec = Vec;

/// How a coordinate vector splits into plain and symmetric-matrix blocks (for I/O).
struct LayoutBlock {
  bool symmetric = false;
  int size = 1;  ///< order for symmetric blocks, length otherwise
  friend bool operator==(const LayoutBlock&, const LayoutBlock&) = default;
};
using Layout = std::vector<LayoutBlock>;

Layout layout_of(const ConeDesc& k);
int layout_dim(const Layout& layout);

/// Symmetric-matrix encoding of a block.
AmbientVec encode(const Mat& sym);
Mat decode(const Eigen::Ref<const Vec>& block, int order);

Vec project_soc(const Eigen::Ref<const Vec>& z);
Vec project_psd(const Eigen::Ref<const Vec>& z, int order, Sign sign);
Vec project(const PrimitiveCone& c, const Eigen::Ref<const Vec>& z);

/// Euclidean projection onto K, computed blockwise.
AmbientVec project(const ConeDesc& k, const AmbientVec& z);
/// True iff |z - project(k, z)| <= tol.membership.
bool contains(const ConeDesc& k, const AmbientVec& z, const Tol& tol = {});
double dist(const ConeDesc& k, const AmbientVec& z);

}  // namespace conestab
