#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace rada {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Matrix manifolds supported by the solver stack.
///
/// Points on both manifolds are represented by matrices with orthonormal
/// columns.  Grassmann points are bases of the subspace they span; operations
/// that depend only on the span (projection onto the manifold, the tangent
/// projector) treat two bases with equal span as the same point.
enum class ManifoldKind { Stiefel, Grassmann };

/// Shape descriptor for a manifold of n-by-p orthonormal matrices.
struct ManifoldDesc {
  ManifoldKind kind = ManifoldKind::Stiefel;
  int n = 0;  ///< ambient rows
  int p = 0;  ///< columns (subspace dimension)
};

namespace detail {

/// Thin QR factor with the sign convention that the triangular factor has a
/// non-negative diagonal, which makes the factor unique and reproducible.
/// Throws if a diagonal entry of R is smaller than 1e-14 in magnitude.
inline Matrix thin_qr_positive(const Matrix& S) {
  const Eigen::Index n = S.rows(), p = S.cols();
  Eigen::HouseholderQR<Matrix> qr(S);
  Matrix Q = qr.householderQ() * Matrix::Identity(n, p);
  const Matrix& QR = qr.matrixQR();
  for (Eigen::Index j = 0; j < p; ++j) {
    const double rjj = QR(j, j);
    if (!(std::abs(rjj) > 1e-14)) {
      throw std::runtime_error(
          "retract: rank-deficient factor (|R_jj| <= 1e-14), step is degenerate");
    }
    if (rjj < 0.0) Q.col(j) = -Q.col(j);
  }
  return Q;
}

}  // namespace detail

/// Draws a point uniformly at random in the sense of the QR construction:
/// a standard Gaussian matrix (column-major fill order) orthonormalized by
/// the sign-fixed thin QR factorization.
inline Matrix random_point(const ManifoldDesc& M, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix G(M.n, M.p);
  for (Eigen::Index j = 0; j < G.cols(); ++j)
    for (Eigen::Index i = 0; i < G.rows(); ++i) G(i, j) = nd(gen);
  return detail::thin_qr_positive(G);
}

/// Orthogonal projection of an ambient matrix G onto the tangent space at X.
///
/// Stiefel:    G - X sym(X' G)  with sym(M) = (M + M')/2.
/// Grassmann:  (I - X X') G  (horizontal space of the quotient).
inline Matrix tangent_project(const ManifoldDesc& M, const Matrix& X,
                              const Matrix& G) {
  if (M.kind == ManifoldKind::Stiefel) {
    Matrix XtG = X.transpose() * G;
    return G - X * ((XtG + XtG.transpose()) * 0.5);
  }
  return G - X * (X.transpose() * G);
}

/// QR retraction: the sign-fixed thin Q factor of X + V.
///
/// If X + V equals X bitwise (in particular when V is exactly zero) the input
/// point is returned unchanged, so retract(X, 0) == X holds exactly and a
/// vanishing step cannot perturb the iterate through round-off.
inline Matrix retract(const ManifoldDesc& /*M*/, const Matrix& X,
                      const Matrix& V) {
  Matrix S = X + V;
  if (S == X) return X;
  if (!S.allFinite())
    throw std::runtime_error("retract: non-finite entries in X + V");
  return detail::thin_qr_positive(S);
}

/// Nearest-point style projection onto the manifold.
///
/// Stiefel: polar factor U V' of the thin SVD of a full-rank n-by-p input;
/// throws if the smallest singular value is <= 1e-14.
/// Grassmann: the input is an n-by-n symmetric matrix; returns the basis of
/// the dominant p-dimensional invariant subspace (eigenvectors of the largest
/// p eigenvalues, ordered by decreasing eigenvalue); throws if the spectral
/// gap between the p-th and (p+1)-th largest eigenvalue is <= 1e-14.
inline Matrix project_to_manifold(const ManifoldDesc& M, const Matrix& Y) {
  if (M.kind == ManifoldKind::Stiefel) {
    if (Y.rows() != M.n || Y.cols() != M.p)
      throw std::invalid_argument("project_to_manifold: bad input shape");
    Eigen::BDCSVD<Matrix> svd(Y, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (!(svd.singularValues().minCoeff() > 1e-14))
      throw std::runtime_error(
          "project_to_manifold: rank-deficient input (sigma_min <= 1e-14)");
    return svd.matrixU() * svd.matrixV().transpose();
  }
  if (Y.rows() != M.n || Y.cols() != M.n)
    throw std::invalid_argument(
        "project_to_manifold: Grassmann projection expects a square matrix");
  Matrix Ys = (Y + Y.transpose()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Matrix> es(Ys);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("project_to_manifold: eigendecomposition failed");
  const Vector& w = es.eigenvalues();  // ascending
  const Eigen::Index n = Ys.rows(), p = M.p;
  if (!(w(n - p) - w(n - p - 1) > 1e-14))
    throw std::runtime_error(
        "project_to_manifold: spectral gap <= 1e-14, dominant subspace ill-defined");
  Matrix X(n, p);
  for (Eigen::Index j = 0; j < p; ++j) X.col(j) = es.eigenvectors().col(n - 1 - j);
  return X;
}

}  // namespace rada
