#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace conestab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised when operand sizes do not agree.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operation's documented precondition does not hold.
struct PreconditionError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Raised when a numerical kernel cannot produce a result (e.g. non-finite input).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_dim(Eigen::Index got, Eigen::Index want, const char* what);
void require_finite(const Eigen::Ref<const Vec>& v, const char* what);

/// Length of the vectorized form of an order-n symmetric matrix.
constexpr int svec_dim(int order) { return order * (order + 1) / 2; }
/// Inverse of svec_dim; throws if m is not triangular.
int svec_order(int m);

/// Lower triangle, column by column, off-diagonals scaled by sqrt(2).
Vec svec(const Mat& a);
Mat smat(const Eigen::Ref<const Vec>& v, int order);

/// Ascending eigen-decomposition of a symmetric matrix.
struct SymEig {
  Vec values;
  Mat vectors;
};
SymEig sym_eig(const Mat& a);

/// Orthonormal bases obtained from a rank-revealing SVD.
struct RankInfo {
  int rank = 0;
  double sigma_max = 0.0;
  double sigma_min_kept = 0.0;
  Mat range;   ///< orthonormal columns spanning the range
  Mat kernel;  ///< orthonormal columns spanning the kernel
};
/// Singular values below rel_tol * sigma_max count as zero.
RankInfo rank_info(const Mat& a, double rel_tol);

/// Moore-Penrose pseudo-inverse with the same rank policy.
Mat pinv(const Mat& a, double rel_tol);

/// Orthonormal basis for the orthogonal complement of span(cols).
Mat complement_basis(const Mat& cols, int ambient, double rel_tol);

}  // namespace conestab
