#include "conestab/cone_set.hpp"

#include "conestab/detail/overloaded.hpp"
#include "conestab/dykstra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace conestab {

using detail::overloaded;

namespace {

Coord polar_coord(Coord c) {
  switch (c) {
    case Coord::free: return Coord::zero;
    case Coord::zero: return Coord::free;
    case Coord::nonneg: return Coord::nonpos;
    case Coord::nonpos: return Coord::nonneg;
  }
  return c;
}

double project_coord(Coord c, double v) {
  switch (c) {
    case Coord::free: return v;
    case Coord::zero: return 0.0;
    case Coord::nonneg: return std::max(v, 0.0);
    case Coord::nonpos: return std::min(v, 0.0);
  }
  return v;
}

Mat rotate_in(const SpectralSet& s, const Eigen::Ref<const Vec>& z) {
  return s.basis.transpose() * smat(z, s.order) * s.basis;
}

Vec rotate_out(const SpectralSet& s, const Mat& h) {
  return svec(s.basis * h * s.basis.transpose());
}

/// Clamp the eigenvalues of sign*m from below at `floor`.
Mat clamp_semidef(const Mat& m, Sign sign, double floor) {
  const double f = sign_factor(sign);
  const SymEig e = sym_eig(f * m);
  return f * (e.vectors * e.values.cwiseMax(floor).asDiagonal() * e.vectors.transpose());
}

Vec project_spectral(const SpectralSet& s, const Eigen::Ref<const Vec>& z, double eps) {
  Mat h = rotate_in(s, z);
  for (int i = 0; i < s.order; ++i) {
    for (int j = 0; j < s.order; ++j) {
      if (s.at(i, j) == Entry::zero) h(i, j) = 0.0;
    }
  }
  const std::vector<int> idx = s.semidef_index();
  if (!idx.empty()) {
    const Mat sub = h(idx, idx);
    h(idx, idx) = clamp_semidef(sub, s.sign, eps);
  }
  return rotate_out(s, h);
}

Vec project_cone_part(SocSet::Kind kind, const Eigen::Ref<const Vec>& z) {
  return kind == SocSet::Kind::cone ? project_soc(z) : Vec(-project_soc(-z));
}

Vec project_soc_set(const SocSet& s, const Eigen::Ref<const Vec>& z) {
  using K = SocSet::Kind;
  const double nn = s.normal.size() ? s.normal.squaredNorm() : 0.0;
  switch (s.kind) {
    case K::whole: return z;
    case K::zero: return Vec::Zero(z.size());
    case K::cone:
    case K::cone_neg: return project_cone_part(s.kind, z);
    case K::halfspace: return z - (std::max(0.0, s.normal.dot(z)) / nn) * s.normal;
    case K::hyperplane: return z - (s.normal.dot(z) / nn) * s.normal;
    case K::ray: return (std::max(0.0, s.normal.dot(z)) / nn) * s.normal;
    case K::line: return (s.normal.dot(z) / nn) * s.normal;
  }
  return z;
}

SocSet soc(SocSet::Kind kind, int n, Vec normal = {}) {
  if (normal.size() > 0) {
    const double len = normal.norm();
    if (len > 0) normal /= len;
  }
  return SocSet{kind, n, std::move(normal)};
}

bool lies_on_boundary(const Eigen::Ref<const Vec>& d, double thr) {
  return std::abs(d(0) - d.tail(d.size() - 1).norm()) <= thr;
}

}  // namespace

std::vector<int> SpectralSet::semidef_index() const {
  std::vector<int> idx;
  for (int i = 0; i < order; ++i) {
    if (at(i, i) == Entry::semidef) idx.push_back(i);
  }
  return idx;
}

int dim(const BlockSet& s) {
  return std::visit(overloaded{[](const CoordSet& c) { return static_cast<int>(c.coords.size()); },
                               [](const SpectralSet& c) { return svec_dim(c.order); },
                               [](const SocSet& c) { return c.dim; }},
                    s);
}

Vec project(const BlockSet& s, const Eigen::Ref<const Vec>& z) {
  require_dim(z.size(), dim(s), "block projection");
  return std::visit(overloaded{
                        [&](const CoordSet& c) -> Vec {
                          Vec out(z.size());
                          for (Eigen::Index i = 0; i < z.size(); ++i) {
                            out(i) = project_coord(c.coords[static_cast<std::size_t>(i)], z(i));
                          }
                          return out;
                        },
                        [&](const SpectralSet& c) -> Vec { return project_spectral(c, z, 0.0); },
                        [&](const SocSet& c) -> Vec { return project_soc_set(c, z); },
                    },
                    s);
}

Vec project_shrunk(const BlockSet& s, const Eigen::Ref<const Vec>& z, double eps) {
  return std::visit(
      overloaded{
          [&](const CoordSet& c) -> Vec {
            Vec out(z.size());
            for (Eigen::Index i = 0; i < z.size(); ++i) {
              switch (c.coords[static_cast<std::size_t>(i)]) {
                case Coord::free: out(i) = z(i); break;
                case Coord::zero: out(i) = 0.0; break;
                case Coord::nonneg: out(i) = std::max(z(i), eps); break;
                case Coord::nonpos: out(i) = std::min(z(i), -eps); break;
              }
            }
            return out;
          },
          [&](const SpectralSet& c) -> Vec { return project_spectral(c, z, eps); },
          [&](const SocSet& c) -> Vec {
            using K = SocSet::Kind;
            switch (c.kind) {
              case K::cone:
              case K::cone_neg: {
                Vec apex = Vec::Zero(z.size());
                apex(0) = c.kind == K::cone ? eps : -eps;
                return apex + project_cone_part(c.kind, z - apex);
              }
              case K::ray: {
                const double coef = std::max(eps, c.normal.dot(z) / c.normal.squaredNorm());
                return coef * c.normal;
              }
              case K::halfspace: {
                const Vec shift = -eps * c.normal / c.normal.norm();
                return shift + project_soc_set(c, z - shift);
              }
              default: return project_soc_set(c, z);
            }
          },
      },
      s);
}

SocSet negated(SocSet s) {
  using K = SocSet::Kind;
  if (s.kind == K::cone) s.kind = K::cone_neg;
  else if (s.kind == K::cone_neg) s.kind = K::cone;
  if (s.normal.size() > 0) s.normal = -s.normal;
  return s;
}

BlockSet polar(const BlockSet& s) {
  return std::visit(
      overloaded{
          [](const CoordSet& c) -> BlockSet {
            CoordSet out{c.coords};
            for (auto& x : out.coords) x = polar_coord(x);
            return out;
          },
          [](const SpectralSet& c) -> BlockSet {
            SpectralSet out = c;
            out.sign = flip(c.sign);
            for (auto& e : out.rule) {
              if (e == Entry::free) {
                e = Entry::zero;
              } else if (e == Entry::zero) {
                e = Entry::free;
              }
            }
            return out;
          },
          [](const SocSet& c) -> BlockSet {
            using K = SocSet::Kind;
            SocSet out = c;
            switch (c.kind) {
              case K::whole: out.kind = K::zero; break;
              case K::zero: out.kind = K::whole; break;
              case K::cone: out.kind = K::cone_neg; break;
              case K::cone_neg: out.kind = K::cone; break;
              case K::halfspace: out.kind = K::ray; break;
              case K::ray: out.kind = K::halfspace; break;
              case K::hyperplane: out.kind = K::line; break;
              case K::line: out.kind = K::hyperplane; break;
            }
            return out;
          },
      },
      s);
}

Mat lineality(const BlockSet& s) {
  return std::visit(
      overloaded{
          [](const CoordSet& c) -> Mat {
            const int n = static_cast<int>(c.coords.size());
            std::vector<int> idx;
            for (int i = 0; i < n; ++i) {
              if (c.coords[static_cast<std::size_t>(i)] == Coord::free) idx.push_back(i);
            }
            Mat out = Mat::Zero(n, static_cast<Eigen::Index>(idx.size()));
            for (std::size_t k = 0; k < idx.size(); ++k) out(idx[k], static_cast<Eigen::Index>(k)) = 1.0;
            return out;
          },
          [](const SpectralSet& c) -> Mat {
            std::vector<Vec> cols;
            for (int j = 0; j < c.order; ++j) {
              for (int i = j; i < c.order; ++i) {
                if (c.at(i, j) != Entry::free) continue;
                Mat e = Mat::Zero(c.order, c.order);
                if (i == j) {
                  e(i, i) = 1.0;
                } else {
                  e(i, j) = e(j, i) = M_SQRT1_2;
                }
                cols.push_back(svec(c.basis * e * c.basis.transpose()));
              }
            }
            Mat out(svec_dim(c.order), static_cast<Eigen::Index>(cols.size()));
            for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = cols[k];
            return out;
          },
          [](const SocSet& c) -> Mat {
            using K = SocSet::Kind;
            switch (c.kind) {
              case K::whole: return Mat::Identity(c.dim, c.dim);
              case K::halfspace:
              case K::hyperplane: return complement_basis(c.normal, c.dim, 1e-12);
              case K::line: return c.normal / c.normal.norm();
              default: return Mat::Zero(c.dim, 0);
            }
          },
      },
      s);
}

BlockSet polar_face(const BlockSet& s, const Eigen::Ref<const Vec>& d, double thr) {
  return std::visit(
      overloaded{
          [&](const CoordSet& c) -> BlockSet {
            CoordSet out{c.coords};
            for (std::size_t i = 0; i < out.coords.size(); ++i) {
              const double di = d(static_cast<Eigen::Index>(i));
              Coord& x = out.coords[i];
              x = polar_coord(c.coords[i]);
              if ((x == Coord::nonneg || x == Coord::nonpos) && std::abs(di) > thr) x = Coord::zero;
            }
            return out;
          },
          [&](const SpectralSet& c) -> BlockSet {
            SpectralSet out = std::get<SpectralSet>(polar(BlockSet{c}));
            const std::vector<int> idx = c.semidef_index();
            if (idx.empty()) return out;
            const Mat h = rotate_in(c, d);
            const Mat sub = h(idx, idx);
            const SymEig e = sym_eig(sign_factor(c.sign) * sub);
            // Rotate the semidefinite block onto the eigenbasis of d's block.
            Mat q = c.basis;
            for (std::size_t a = 0; a < idx.size(); ++a) {
              q.col(idx[a]) = c.basis(Eigen::all, idx) * e.vectors.col(static_cast<Eigen::Index>(a));
            }
            out.basis = q;
            const int n = c.order;
            for (std::size_t a = 0; a < idx.size(); ++a) {
              // Entries between S and its complement must not depend on the S row.
              for (int j = 0; j < n; ++j) {
                if (std::find(idx.begin(), idx.end(), j) != idx.end()) continue;
                if (c.at(idx[a], j) != c.at(idx[0], j)) {
                  throw std::logic_error("spectral set rules are not rotation invariant");
                }
              }
              if (std::abs(e.values(static_cast<Eigen::Index>(a))) <= thr) continue;
              for (int j = 0; j < n; ++j) {
                if (std::find(idx.begin(), idx.end(), j) == idx.end()) continue;
                out.rule[static_cast<std::size_t>(idx[a] * n + j)] = Entry::zero;
                out.rule[static_cast<std::size_t>(j * n + idx[a])] = Entry::zero;
              }
            }
            return out;
          },
          [&](const SocSet& c) -> BlockSet {
            using K = SocSet::Kind;
            const int n = c.dim;
            const double dn = d.norm();
            switch (c.kind) {
              case K::whole: return soc(K::zero, n);
              case K::zero: return soc(K::whole, n);
              case K::cone:
              case K::cone_neg: {
                const Vec dd = c.kind == K::cone ? Vec(d) : Vec(-d);
                if (dn <= thr) return soc(c.kind == K::cone ? K::cone_neg : K::cone, n);
                if (!lies_on_boundary(dd, thr)) return soc(K::zero, n);
                Vec a = d;
                a(0) = -d(0);
                return soc(K::ray, n, a);
              }
              case K::halfspace:
                return c.normal.dot(d) < -thr ? soc(K::zero, n) : soc(K::ray, n, c.normal);
              case K::hyperplane: return soc(K::line, n, c.normal);
              case K::ray:
                return c.normal.dot(d) > thr ? soc(K::hyperplane, n, c.normal)
                                             : soc(K::halfspace, n, c.normal);
              case K::line: return soc(K::hyperplane, n, c.normal);
            }
            return soc(K::zero, n);
          },
      },
      s);
}

// ---------------------------------------------------------------------------
// ConeSet implementations.

class ConeSet::Impl {
 public:
  virtual ~Impl() = default;
  virtual Kind kind() const = 0;
  virtual int dim() const = 0;
  virtual Vec project(const Vec& z) const = 0;
  virtual std::string describe() const = 0;
  virtual bool contains(const Vec& z, const Tol& tol) const {
    return (z - project(z)).norm() <= tol.membership * std::max(1.0, z.norm());
  }
};

namespace {

class ProductImpl final : public ConeSet::Impl {
 public:
  explicit ProductImpl(std::vector<BlockSet> blocks) : blocks_(std::move(blocks)) {
    offsets_.push_back(0);
    for (const auto& b : blocks_) offsets_.push_back(offsets_.back() + conestab::dim(b));
  }
  ConeSet::Kind kind() const override { return ConeSet::Kind::primitive_face; }
  int dim() const override { return offsets_.back(); }
  Vec project(const Vec& z) const override {
    require_dim(z.size(), dim(), "cone set projection");
    Vec out(z.size());
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const int n = offsets_[b + 1] - offsets_[b];
      out.segment(offsets_[b], n) = conestab::project(blocks_[b], z.segment(offsets_[b], n));
    }
    return out;
  }
  std::string describe() const override { return "closed-form product of " + std::to_string(blocks_.size()) + " blocks"; }

  const std::vector<BlockSet>& blocks() const { return blocks_; }
  const std::vector<int>& offsets() const { return offsets_; }

 private:
  std::vector<BlockSet> blocks_;
  std::vector<int> offsets_;
};

class PolarImpl final : public ConeSet::Impl {
 public:
  explicit PolarImpl(ConeSet base) : base_(std::move(base)) {}
  ConeSet::Kind kind() const override { return ConeSet::Kind::polar_of; }
  int dim() const override { return base_.dim(); }
  Vec project(const Vec& z) const override { return z - base_.project(z); }
  std::string describe() const override { return "polar of (" + base_.describe() + ")"; }
  const ConeSet& base() const { return base_; }

 private:
  ConeSet base_;
};

class IntersectImpl final : public ConeSet::Impl {
 public:
  IntersectImpl(ConeSet base, Mat basis, ConeSet::Kind kind, Tol tol)
      : base_(std::move(base)), basis_(std::move(basis)), kind_(kind), tol_(tol) {}
  ConeSet::Kind kind() const override { return kind_; }
  int dim() const override { return base_.dim(); }
  Vec project(const Vec& z) const override {
    if (basis_.cols() == 0) return Vec::Zero(z.size());
    const auto onto_base = [this](const Vec& x) { return base_.project(x); };
    const auto onto_span = [this](const Vec& x) { return project_span(basis_, x); };
    return dykstra(onto_base, onto_span, z, tol_).point;
  }
  bool contains(const Vec& z, const Tol& tol) const override {
    const double scale = tol.membership * std::max(1.0, z.norm());
    return (z - project_span(basis_, z)).norm() <= scale && base_.contains(z, tol);
  }
  std::string describe() const override {
    return "(" + base_.describe() + ") intersected with a " + std::to_string(basis_.cols()) +
           "-dimensional subspace";
  }

 private:
  ConeSet base_;
  Mat basis_;
  ConeSet::Kind kind_;
  Tol tol_;
};

class SpanClosureImpl final : public ConeSet::Impl {
 public:
  SpanClosureImpl(ConeSet base, Vec v, Tol tol) : base_(std::move(base)), v_(std::move(v)), tol_(tol) {}
  ConeSet::Kind kind() const override { return ConeSet::Kind::shifted_span_closure; }
  int dim() const override { return base_.dim(); }
  Vec project(const Vec& z) const override {
    const double s = best_shift(z);
    return base_.project(z - s * v_) + s * v_;
  }
  std::string describe() const override { return "closure of (" + base_.describe() + ") + span{v}"; }

 private:
  // dist(z - s v, C) is convex in s; search s = scale * tan(theta) by golden section.
  double best_shift(const Vec& z) const {
    const double vn = v_.norm();
    if (vn == 0.0) return 0.0;
    const double scale = std::max(1.0, z.norm()) / vn;
    const auto f = [&](double theta) { return base_.dist(z - scale * std::tan(theta) * v_); };
    const double limit = std::atan(1e6);
    double lo = -limit, hi = limit;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    double fa = f(a), fb = f(b);
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
      if (fa <= fb) {
        hi = b; b = a; fb = fa; a = hi - g * (hi - lo); fa = f(a);
      } else {
        lo = a; a = b; fa = fb; b = lo + g * (hi - lo); fb = f(b);
      }
    }
    (void)tol_;
    return scale * std::tan(0.5 * (lo + hi));
  }

  ConeSet base_;
  Vec v_;
  Tol tol_;
};

}  // namespace

ConeSet ConeSet::product(std::vector<BlockSet> blocks) {
  return ConeSet(std::make_shared<const ProductImpl>(std::move(blocks)));
}

ConeSet ConeSet::whole(int n) { return product({CoordSet{std::vector<Coord>(static_cast<std::size_t>(n), Coord::free)}}); }
ConeSet ConeSet::zero(int n) { return product({CoordSet{std::vector<Coord>(static_cast<std::size_t>(n), Coord::zero)}}); }

ConeSet::Kind ConeSet::kind() const { return impl_->kind(); }
int ConeSet::dim() const { return impl_->dim(); }
std::string ConeSet::describe() const { return impl_->describe(); }

Vec ConeSet::project(const Vec& z) const {
  require_dim(z.size(), dim(), "cone set projection");
  require_finite(z, "cone set projection");
  return impl_->project(z);
}

bool ConeSet::contains(const Vec& z, const Tol& tol) const {
  require_dim(z.size(), dim(), "cone set membership");
  return impl_->contains(z, tol);
}

ConeSet ConeSet::polar() const {
  if (const auto* p = dynamic_cast<const ProductImpl*>(impl_.get())) {
    std::vector<BlockSet> out;
    out.reserve(p->blocks().size());
    for (const auto& b : p->blocks()) out.push_back(conestab::polar(b));
    return product(std::move(out));
  }
  if (const auto* p = dynamic_cast<const PolarImpl*>(impl_.get())) return p->base();
  return ConeSet(std::make_shared<const PolarImpl>(*this));
}

ConeSet ConeSet::intersect_subspace(const Mat& basis, const Tol& tol) const {
  require_dim(basis.rows(), dim(), "subspace basis");
  const Mat ortho = rank_info(basis, 1e-12).range;
  return ConeSet(std::make_shared<const IntersectImpl>(*this, ortho, Kind::intersect_subspace, tol));
}

ConeSet ConeSet::intersect_orthogonal(const Vec& d, const Tol& tol) const {
  require_dim(d.size(), dim(), "hyperplane normal");
  const Mat ortho = complement_basis(d, dim(), 1e-12);
  return ConeSet(
      std::make_shared<const IntersectImpl>(*this, ortho, Kind::intersect_hyperplane_complement, tol));
}

ConeSet ConeSet::span_closure(const Vec& v, const Tol& tol) const {
  require_dim(v.size(), dim(), "span direction");
  return ConeSet(std::make_shared<const SpanClosureImpl>(*this, v, tol));
}

ConeSet ConeSet::polar_face(const Vec& d, const Tol& tol) const {
  require_dim(d.size(), dim(), "face direction");
  if (!contains(d, tol)) throw PreconditionError("direction is not a member of the cone");
  const auto* p = dynamic_cast<const ProductImpl*>(impl_.get());
  if (p == nullptr) return polar().intersect_orthogonal(d, tol);
  const double thr = zero_threshold(tol, d.norm()) + tol.membership * std::max(1.0, d.norm());
  std::vector<BlockSet> out;
  out.reserve(p->blocks().size());
  const auto& off = p->offsets();
  for (std::size_t b = 0; b < p->blocks().size(); ++b) {
    out.push_back(conestab::polar_face(p->blocks()[b], d.segment(off[b], off[b + 1] - off[b]), thr));
  }
  return product(std::move(out));
}

const std::vector<BlockSet>& ConeSet::blocks() const {
  const auto* p = dynamic_cast<const ProductImpl*>(impl_.get());
  if (p == nullptr) throw std::logic_error("cone set has no closed-form blocks");
  return p->blocks();
}

std::vector<int> ConeSet::offsets() const {
  const auto* p = dynamic_cast<const ProductImpl*>(impl_.get());
  if (p == nullptr) throw std::logic_error("cone set has no closed-form blocks");
  return p->offsets();
}

Mat ConeSet::lineality_basis() const {
  const auto& bl = blocks();
  const auto off = offsets();
  std::vector<Mat> parts;
  Eigen::Index cols = 0;
  for (const auto& b : bl) {
    parts.push_back(lineality(b));
    cols += parts.back().cols();
  }
  Mat out = Mat::Zero(dim(), cols);
  Eigen::Index c = 0;
  for (std::size_t b = 0; b < bl.size(); ++b) {
    out.block(off[b], c, parts[b].rows(), parts[b].cols()) = parts[b];
    c += parts[b].cols();
  }
  return out;
}

Vec ConeSet::project_shrunk(const Vec& z, double eps) const {
  const auto& bl = blocks();
  const auto off = offsets();
  require_dim(z.size(), dim(), "shrunk projection");
  Vec out(z.size());
  for (std::size_t b = 0; b < bl.size(); ++b) {
    const int n = off[b + 1] - off[b];
    out.segment(off[b], n) = conestab::project_shrunk(bl[b], z.segment(off[b], n), eps);
  }
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "holds") return Verdict::holds;
  if (s == "fails") return Verdict::fails;
  if (s == "inconclusive") return Verdict::inconclusive;
  throw std::invalid_argument("unknown verdict '" + s + "'");
}

bool operator==(const Certificate& a, const Certificate& b) {
  const bool wit = a.witness.has_value() == b.witness.has_value() &&
                   (!a.witness || (a.witness->size() == b.witness->size() && *a.witness == *b.witness));
  return a.verdict == b.verdict && a.residual == b.residual && wit && a.method == b.method &&
         a.tol == b.tol && a.assumed == b.assumed && a.checked == b.checked && a.detail == b.detail;
}

// ---------------------------------------------------------------------------
// First-order geometry.

void require_member(const ConeDesc& k, const AmbientVec& y, const Tol& tol) {
  require_dim(y.size(), k.dim(), "point");
  const double d = dist(k, y);
  if (d > tol.membership * std::max(1.0, y.norm())) {
    throw PreconditionError("point is not in K: dist = " + std::to_string(d));
  }
}

void require_graph_point(const ConeDesc& k, const AmbientVec& y, const AmbientVec& lambda,
                         const Tol& tol) {
  require_dim(y.size(), k.dim(), "graph point");
  require_dim(lambda.size(), k.dim(), "graph multiplier");
  const Vec z = y + lambda;
  const double r = (y - project(k, z)).norm();
  if (r > tol.membership * std::max(1.0, z.norm())) {
    throw PreconditionError("pair is not on the graph of the normal cone: residual = " +
                            std::to_string(r));
  }
}

namespace {

BlockSet tangent_block(const PrimitiveCone& c, const Eigen::Ref<const Vec>& y, const Tol& tol) {
  const double thr = zero_threshold(tol, y.norm()) + tol.membership;
  return std::visit(
      overloaded{
          [&](const Orthant& p) -> BlockSet {
            CoordSet out{std::vector<Coord>(static_cast<std::size_t>(p.dim))};
            const double s = sign_factor(p.sign);
            for (int i = 0; i < p.dim; ++i) {
              out.coords[static_cast<std::size_t>(i)] =
                  s * y(i) > thr ? Coord::free : (p.sign == Sign::plus ? Coord::nonneg : Coord::nonpos);
            }
            return out;
          },
          [&](const ZeroCone& p) -> BlockSet {
            return CoordSet{std::vector<Coord>(static_cast<std::size_t>(p.dim), Coord::zero)};
          },
          [&](const FreeCone& p) -> BlockSet {
            return CoordSet{std::vector<Coord>(static_cast<std::size_t>(p.dim), Coord::free)};
          },
          [&](const SecondOrder& p) -> BlockSet {
            // The minus cone is the reflection of the plus cone.
            const double s = sign_factor(p.sign);
            const Vec ys = s * y;
            const double r = ys.tail(p.dim - 1).norm();
            SocSet out;
            if (ys(0) - r > thr) {
              out = soc(SocSet::Kind::whole, p.dim);
            } else if (ys.norm() <= thr) {
              out = soc(SocSet::Kind::cone, p.dim);
            } else {
              Vec a(p.dim);
              a(0) = -1.0;
              a.tail(p.dim - 1) = ys.tail(p.dim - 1) / r;
              out = soc(SocSet::Kind::halfspace, p.dim, a);
            }
            return p.sign == Sign::plus ? out : negated(out);
          },
          [&](const Semidefinite& p) -> BlockSet {
            const double s = sign_factor(p.sign);
            const SymEig e = sym_eig(s * smat(y, p.order));
            const double t = zero_threshold(tol, e.values.cwiseAbs().maxCoeff()) + tol.membership;
            SpectralSet out{p.order, e.vectors,
                            std::vector<Entry>(static_cast<std::size_t>(p.order * p.order), Entry::free),
                            p.sign};
            for (int i = 0; i < p.order; ++i) {
              for (int j = 0; j < p.order; ++j) {
                if (e.values(i) <= t && e.values(j) <= t) {
                  out.rule[static_cast<std::size_t>(i * p.order + j)] = Entry::semidef;
                }
              }
            }
            return out;
          },
      },
      c);
}

}  // namespace

ConeSet tangent_cone(const ConeDesc& k, const AmbientVec& y, const Tol& tol) {
  require_member(k, y, tol);
  std::vector<BlockSet> blocks;
  blocks.reserve(k.size());
  for (std::size_t b = 0; b < k.size(); ++b) {
    blocks.push_back(tangent_block(k.block(b), y.segment(k.offset(b), k.block_dim(b)), tol));
  }
  return ConeSet::product(std::move(blocks));
}

ConeSet normal_cone(const ConeDesc& k, const AmbientVec& y, const Tol& tol) {
  return tangent_cone(k, y, tol).polar();
}

bool ri_normal_contains(const ConeDesc& k, const AmbientVec& y, const AmbientVec& lambda,
                        const Tol& tol) {
  require_graph_point(k, y, lambda, tol);
  const double scale = std::max(1.0, (y + lambda).norm());
  const double thr = zero_threshold(tol, scale) + tol.membership * scale;
  for (std::size_t b = 0; b < k.size(); ++b) {
    const auto yb = y.segment(k.offset(b), k.block_dim(b));
    const auto lb = lambda.segment(k.offset(b), k.block_dim(b));
    const bool ok = std::visit(
        overloaded{
            [&](const Orthant& p) {
              const double s = sign_factor(p.sign);
              for (int i = 0; i < p.dim; ++i) {
                const bool active = s * yb(i) <= thr;
                if (active && std::abs(lb(i)) <= thr) return false;
              }
              return true;
            },
            [&](const ZeroCone&) { return true; },
            [&](const FreeCone&) { return true; },
            [&](const SecondOrder& p) {
              const double s = sign_factor(p.sign);
              const double ry = yb.tail(p.dim - 1).norm();
              const double rl = lb.tail(p.dim - 1).norm();
              if (s * yb(0) - ry > thr) return true;               // interior: N = {0}
              if (yb.norm() <= thr) return -s * lb(0) - rl > thr;  // apex: interior of the polar
              return lb.norm() > thr;                       // boundary: open ray
            },
            [&](const Semidefinite& p) {
              const SymEig ey = sym_eig(smat(yb, p.order));
              const SymEig el = sym_eig(smat(lb, p.order));
              int rank = 0;
              for (int i = 0; i < p.order; ++i) {
                rank += std::abs(ey.values(i)) > thr;
                rank += std::abs(el.values(i)) > thr;
              }
              return rank == p.order;
            },
        },
        k.block(b));
    if (!ok) return false;
  }
  return true;
}

}  // namespace conestab
