#include "conestab/cone.hpp"
#include "conestab/detail/overloaded.hpp"

#include <algorithm>
#include <type_traits>

namespace conestab {

namespace {

using detail::overloaded;

const char* sign_name(Sign s) { return s == Sign::plus ? "plus" : "minus"; }

void check_positive(int n, const char* what) {
  if (n < 1) throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

int ambient_dim(const PrimitiveCone& c) {
  return std::visit(overloaded{[](const Semidefinite& p) { return svec_dim(p.order); },
                               [](const auto& p) { return p.dim; }},
                    c);
}

PrimitiveCone polar(const PrimitiveCone& c) {
  return std::visit(overloaded{
                        [](const Orthant& p) -> PrimitiveCone { return Orthant{p.dim, flip(p.sign)}; },
                        [](const SecondOrder& p) -> PrimitiveCone { return SecondOrder{p.dim, flip(p.sign)}; },
                        [](const Semidefinite& p) -> PrimitiveCone {
                          return Semidefinite{p.order, flip(p.sign)};
                        },
                        [](const ZeroCone& p) -> PrimitiveCone { return FreeCone{p.dim}; },
                        [](const FreeCone& p) -> PrimitiveCone { return ZeroCone{p.dim}; },
                    },
                    c);
}

bool is_polyhedral(const PrimitiveCone& c) {
  return std::visit(overloaded{[](const Semidefinite& p) { return p.order == 1; },
                               [](const SecondOrder& p) { return p.dim <= 2; },
                               [](const auto&) { return true; }},
                    c);
}

std::string describe(const PrimitiveCone& c) {
  return std::visit(
      overloaded{
          [](const Orthant& p) {
            return "Orthant(" + std::to_string(p.dim) + "," + sign_name(p.sign) + ")";
          },
          [](const SecondOrder& p) {
            return "SOC(" + std::to_string(p.dim) + (p.sign == Sign::plus ? ")" : ",minus)");
          },
          [](const Semidefinite& p) {
            return "PSD(" + std::to_string(p.order) + "," + sign_name(p.sign) + ")";
          },
          [](const ZeroCone& p) { return "Zero(" + std::to_string(p.dim) + ")"; },
          [](const FreeCone& p) { return "Free(" + std::to_string(p.dim) + ")"; },
      },
      c);
}

void Tol::validate() const {
  if (!(membership > 0) || !(zero > 0) || max_iter <= 0) {
    throw std::invalid_argument("tolerances must be strictly positive");
  }
}

ConeDesc::ConeDesc(std::initializer_list<PrimitiveCone> blocks)
    : ConeDesc(std::vector<PrimitiveCone>(blocks)) {}

ConeDesc::ConeDesc(std::vector<PrimitiveCone> blocks) : blocks_(std::move(blocks)) {
  offsets_.reserve(blocks_.size() + 1);
  for (const auto& b : blocks_) {
    std::visit(overloaded{[](const Semidefinite& p) { check_positive(p.order, "PSD order"); },
                          [](const auto& p) { check_positive(p.dim, "cone dimension"); }},
               b);
    offsets_.push_back(offsets_.back() + ambient_dim(b));
  }
}

ConeDesc ConeDesc::polar() const {
  std::vector<PrimitiveCone> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.push_back(conestab::polar(b));
  return ConeDesc(std::move(out));
}

bool ConeDesc::polyhedral() const {
  return std::all_of(blocks_.begin(), blocks_.end(), [](const auto& b) { return is_polyhedral(b); });
}

std::string ConeDesc::describe() const {
  std::string s;
  for (const auto& b : blocks_) {
    if (!s.empty()) s += " x ";
    s += conestab::describe(b);
  }
  return s.empty() ? "{}" : s;
}

ConeDesc concat(const ConeDesc& a, const ConeDesc& b) {
  std::vector<PrimitiveCone> blocks = a.blocks();
  blocks.insert(blocks.end(), b.blocks().begin(), b.blocks().end());
  return ConeDesc(std::move(blocks));
}

Layout layout_of(const ConeDesc& k) {
  Layout out;
  for (const auto& b : k.blocks()) {
    if (const auto* p = std::get_if<Semidefinite>(&b)) {
      out.push_back({true, p->order});
    } else {
      out.push_back({false, ambient_dim(b)});
    }
  }
  return out;
}

int layout_dim(const Layout& layout) {
  int n = 0;
  for (const auto& b : layout) n += b.symmetric ? svec_dim(b.size) : b.size;
  return n;
}

AmbientVec encode(const Mat& sym) { return svec(sym); }
Mat decode(const Eigen::Ref<const Vec>& block, int order) { return smat(block, order); }

Vec project_soc(const Eigen::Ref<const Vec>& z) {
  const double t = z(0);
  const double r = z.tail(z.size() - 1).norm();
  if (r <= t) return z;
  if (r <= -t) return Vec::Zero(z.size());
  Vec out(z.size());
  const double scale = 0.5 * (t + r);
  out(0) = scale;
  out.tail(z.size() - 1) = (scale / r) * z.tail(z.size() - 1);
  return out;
}

Vec project_psd(const Eigen::Ref<const Vec>& z, int order, Sign sign) {
  const double s = sign_factor(sign);
  const SymEig e = sym_eig(s * smat(z, order));
  const Vec clipped = e.values.cwiseMax(0.0);
  return s * svec(e.vectors * clipped.asDiagonal() * e.vectors.transpose());
}

Vec project(const PrimitiveCone& c, const Eigen::Ref<const Vec>& z) {
  require_dim(z.size(), ambient_dim(c), "project");
  return std::visit(overloaded{
                        [&](const Orthant& p) -> Vec {
                          return p.sign == Sign::plus ? Vec(z.cwiseMax(0.0)) : Vec(z.cwiseMin(0.0));
                        },
                        [&](const SecondOrder& p) -> Vec {
                          return p.sign == Sign::plus ? project_soc(z) : Vec(-project_soc(-z));
                        },
                        [&](const Semidefinite& p) -> Vec { return project_psd(z, p.order, p.sign); },
                        [&](const ZeroCone&) -> Vec { return Vec::Zero(z.size()); },
                        [&](const FreeCone&) -> Vec { return z; },
                    },
                    c);
}

AmbientVec project(const ConeDesc& k, const AmbientVec& z) {
  require_dim(z.size(), k.dim(), "project");
  require_finite(z, "project");
  AmbientVec out(z.size());
  for (std::size_t b = 0; b < k.size(); ++b) {
    out.segment(k.offset(b), k.block_dim(b)) =
        project(k.block(b), z.segment(k.offset(b), k.block_dim(b)));
  }
  return out;
}

double dist(const ConeDesc& k, const AmbientVec& z) { return (z - project(k, z)).norm(); }

bool contains(const ConeDesc& k, const AmbientVec& z, const Tol& tol) {
  return dist(k, z) <= tol.membership;
}

}  // namespace conestab
