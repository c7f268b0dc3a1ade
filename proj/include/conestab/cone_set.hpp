#pragma once

#include "conestab/cone.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace conestab {

/// Per-coordinate constraint of a polyhedral block.
enum class Coord : std::uint8_t { free, nonneg, nonpos, zero };

struct CoordSet {
  std::vector<Coord> coords;
};

/// Rule for one entry of a symmetric matrix written in a fixed orthonormal basis.
enum class Entry : std::uint8_t { free, zero, semidef };

/// Sets of symmetric matrices H with Qᵀ H Q constrained entrywise: the entries
/// marked semidef form a principal block that must be sign-semidefinite.
struct SpectralSet {
  int order = 0;
  Mat basis;                ///< Q, orthonormal columns
  std::vector<Entry> rule;  ///< order*order, symmetric, row-major
  Sign sign = Sign::plus;

  Entry at(int i, int j) const { return rule[static_cast<std::size_t>(i * order + j)]; }
  std::vector<int> semidef_index() const;
};

/// Cones inside one second-order block; `normal` is the defining vector where relevant.
struct SocSet {
  enum class Kind : std::uint8_t {
    whole,
    zero,
    cone,        ///< the second-order cone itself
    cone_neg,    ///< its negative (the polar)
    halfspace,   ///< {h : <normal,h> <= 0}
    hyperplane,  ///< {h : <normal,h> = 0}
    ray,         ///< {c·normal : c >= 0}
    line,        ///< span{normal}
  };
  Kind kind = Kind::whole;
  int dim = 1;
  Vec normal;
};

using BlockSet = std::variant<CoordSet, SpectralSet, SocSet>;

int dim(const BlockSet& s);
/// The reflection -S of a second-order block set.
SocSet negated(SocSet s);
Vec project(const BlockSet& s, const Eigen::Ref<const Vec>& z);
BlockSet polar(const BlockSet& s);
/// Orthonormal basis of the lineality space, in ambient block coordinates.
Mat lineality(const BlockSet& s);
/// polar(s) ∩ d⊥ for d in s.
BlockSet polar_face(const BlockSet& s, const Eigen::Ref<const Vec>& d, double thr);
/// Projection onto a closed subset of the relative interior, `eps` inside the boundary.
Vec project_shrunk(const BlockSet& s, const Eigen::Ref<const Vec>& z, double eps);

/// A closed convex cone with membership, projection and linear maximization.
/// Immutable value type; copies share the underlying representation.
class ConeSet {
 public:
  enum class Kind {
    primitive_face,
    polar_of,
    intersect_subspace,
    intersect_hyperplane_complement,
    shifted_span_closure,
  };

  class Impl;

  /// Product of closed-form blocks laid out consecutively.
  static ConeSet product(std::vector<BlockSet> blocks);
  static ConeSet whole(int dim);
  static ConeSet zero(int dim);

  Kind kind() const;
  int dim() const;
  std::string describe() const;

  Vec project(const Vec& z) const;
  double dist(const Vec& z) const { return (z - project(z)).norm(); }
  /// dist(z, C) <= tol.membership * max(1, |z|).
  bool contains(const Vec& z, const Tol& tol = {}) const;
  /// sup {<c, z> : z in C, |z| <= 1}.
  double linear_max(const Vec& c) const { return project(c).norm(); }

  ConeSet polar() const;
  /// C ∩ span(basis); projection by Dykstra.
  ConeSet intersect_subspace(const Mat& basis, const Tol& tol = {}) const;
  /// C ∩ d⊥; projection by Dykstra.
  ConeSet intersect_orthogonal(const Vec& d, const Tol& tol = {}) const;
  /// cl(C + span{v}); membership by a one-dimensional convex search.
  ConeSet span_closure(const Vec& v, const Tol& tol = {}) const;
  /// polar(C) ∩ d⊥ for d in C: blockwise closed form when available, otherwise Dykstra.
  ConeSet polar_face(const Vec& d, const Tol& tol = {}) const;

  bool closed_form() const { return kind() == Kind::primitive_face; }
  /// Blocks of a closed-form set; throws otherwise.
  const std::vector<BlockSet>& blocks() const;
  std::vector<int> offsets() const;
  /// Orthonormal basis of the lineality space (closed-form sets only).
  Mat lineality_basis() const;
  /// Closed subset of the relative interior (closed-form sets only).
  Vec project_shrunk(const Vec& z, double eps) const;

 private:
  explicit ConeSet(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Outcome of a decision procedure.
enum class Verdict { holds, fails, inconclusive };
std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct Certificate {
  Verdict verdict = Verdict::inconclusive;
  double residual = 0.0;
  std::optional<Vec> witness;
  std::string method;
  Tol tol;
  std::vector<std::string> assumed;  ///< hypotheses taken on trust
  std::vector<std::string> checked;  ///< hypotheses verified numerically
  std::string detail;

  bool holds() const { return verdict == Verdict::holds; }
  bool fails() const { return verdict == Verdict::fails; }
  friend bool operator==(const Certificate&, const Certificate&);
};

// First-order geometry of K at a point.

/// Validates y ∈ K; throws PreconditionError otherwise.
void require_member(const ConeDesc& k, const AmbientVec& y, const Tol& tol);
/// Validates (y, λ) ∈ gph N_K; throws PreconditionError otherwise.
void require_graph_point(const ConeDesc& k, const AmbientVec& y, const AmbientVec& lambda,
                         const Tol& tol);

ConeSet tangent_cone(const ConeDesc& k, const AmbientVec& y, const Tol& tol = {});
ConeSet normal_cone(const ConeDesc& k, const AmbientVec& y, const Tol& tol = {});
bool ri_normal_contains(const ConeDesc& k, const AmbientVec& y, const AmbientVec& lambda,
                        const Tol& tol = {});

}  // namespace conestab
