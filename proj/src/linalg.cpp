#include "conestab/linalg.hpp"

#include <cmath>

namespace conestab {

void require_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(want) +
                         ", got " + std::to_string(got));
  }
}

void require_finite(const Eigen::Ref<const Vec>& v, const char* what) {
  if (!v.allFinite()) throw NumericalError(std::string(what) + ": non-finite entries");
}

int svec_order(int m) {
  const int n = static_cast<int>(std::lround((std::sqrt(8.0 * m + 1.0) - 1.0) / 2.0));
  if (m < 0 || svec_dim(n) != m) {
    throw DimensionError("length " + std::to_string(m) + " is not n(n+1)/2 for any n");
  }
  return n;
}

Vec svec(const Mat& a) {
  if (a.rows() != a.cols()) throw DimensionError("svec: matrix is not square");
  const int n = static_cast<int>(a.rows());
  Vec out(svec_dim(n));
  int k = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      out(k++) = (i == j) ? a(i, i) : M_SQRT2 * 0.5 * (a(i, j) + a(j, i));
    }
  }
  return out;
}

Mat smat(const Eigen::Ref<const Vec>& v, int order) {
  require_dim(v.size(), svec_dim(order), "smat");
  Mat a(order, order);
  int k = 0;
  for (int j = 0; j < order; ++j) {
    for (int i = j; i < order; ++i) {
      if (i == j) {
        a(i, i) = v(k++);
      } else {
        a(i, j) = a(j, i) = v(k++) / M_SQRT2;
      }
    }
  }
  return a;
}

SymEig sym_eig(const Mat& a) {
  if (!a.allFinite()) throw NumericalError("eigensolver: non-finite matrix");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()));
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

RankInfo rank_info(const Mat& a, double rel_tol) {
  RankInfo info;
  const auto rows = a.rows();
  const auto cols = a.cols();
  if (rows == 0 || cols == 0) {
    info.range = Mat::Zero(rows, 0);
    info.kernel = Mat::Identity(cols, cols);
    return info;
  }
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  info.sigma_max = s(0);
  const double cut = rel_tol * std::max(info.sigma_max, 1e-300);
  int r = 0;
  while (r < s.size() && s(r) > cut && s(r) > 0.0) ++r;
  info.rank = r;
  info.sigma_min_kept = r > 0 ? s(r - 1) : 0.0;
  info.range = svd.matrixU().leftCols(r);
  info.kernel = svd.matrixV().rightCols(cols - r);
  return info;
}

Mat pinv(const Mat& a, double rel_tol) {
  if (a.rows() == 0 || a.cols() == 0) return Mat::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  const double cut = rel_tol * std::max(s(0), 1e-300);
  Vec inv = Vec::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cut && s(i) > 0.0) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Mat complement_basis(const Mat& cols, int ambient, double rel_tol) {
  if (cols.cols() == 0) return Mat::Identity(ambient, ambient);
  require_dim(cols.rows(), ambient, "complement_basis");
  return rank_info(cols.transpose(), rel_tol).kernel;
}

}  // namespace conestab
