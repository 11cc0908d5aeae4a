#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rada/manifold.hpp"
#include "rada/prox.hpp"

namespace rada {

/// Smoothness constants used to build a projected-gradient stepsize:
/// L_f bounds the Euclidean Hessian of f, L_A0 the operator norm of the
/// differential of A, L_A1 its Lipschitz modulus, and rho_A the norm bound
/// sup ||A(x)|| relevant to the dual term.
struct Lipschitz {
  double L_f = 0.0;
  double L_A0 = 0.0;
  double L_A1 = 0.0;
  double rho_A = 0.0;
};

/// A saddle-point instance  min_{x in M} max_y  f(x) + <A(x), y> - h(y),
/// with M a Stiefel or Grassmann manifold, A a smooth map into the dual
/// space, and h an indicator from the prox toolbox.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual const ManifoldDesc& manifold() const = 0;
  virtual const ProxDesc& prox() const = 0;

  virtual double f(const Matrix& X) const = 0;
  /// Euclidean (ambient) gradient of f.
  virtual Matrix fgrad(const Matrix& X) const = 0;
  /// The linear-in-y coupling map A(X), shaped like the dual variables.
  virtual Matrix Aop(const Matrix& X) const = 0;
  /// Adjoint action: the ambient gradient of x |-> <A(x), Y> at X.
  virtual Matrix Aadj(const Matrix& X, const Matrix& Y) const = 0;

  /// Smoothness constants if known; disabled for instances without them.
  virtual std::optional<Lipschitz> lipschitz() const { return std::nullopt; }

  /// Whether the instance exposes a gradient in the symmetric ambient space
  /// of projector matrices Q = X X' (Grassmann instances with A(Q) affine).
  virtual bool has_projector_form() const { return false; }
  /// Gradient of Q |-> f(Q) + <A(Q), Yh> in projector space (N-by-N).
  virtual Matrix projector_grad(const Matrix& /*X*/,
                                const Matrix& /*Yh*/) const {
    throw std::logic_error("projector_grad: not available for this problem");
  }

  /// Dual-domain radius R = sup_{y in dom h} ||y||_F.
  double R() const { return prox().radius(); }

  /// Tangent-space projection at X for this problem's manifold.
  Matrix tproj(const Matrix& X, const Matrix& G) const {
    return tangent_project(manifold(), X, G);
  }

  /// Primal objective phi(x) = f(x) + h*(A(x)).
  double phi(const Matrix& X) const {
    return f(X) + conj_value(prox(), Aop(X));
  }
};

/// Sparse principal component analysis:
///   min_{X in St(d,r)}  -||A' X||_F^2 + mu ||X||_1,
/// written with A(X) = X and h the indicator of the mu-box, so that
/// h*(X) = mu ||X||_1.  The data matrix A is d-by-N (columns are samples).
class SpcaProblem : public Problem {
 public:
  SpcaProblem(Matrix data, int r, double mu)
      : A_(std::move(data)), mani_{ManifoldKind::Stiefel, int(A_.rows()), r},
        prox_{ProxFamily::LinfBall, mu, int(A_.rows()), r} {
    if (r <= 0 || r > A_.cols() || !(mu >= 0.0))
      throw std::invalid_argument("SpcaProblem: bad dimensions or mu");
    Eigen::SelfAdjointEigenSolver<Matrix> es(A_.transpose() * A_);
    lip_ = Lipschitz{2.0 * es.eigenvalues().maxCoeff(), 1.0, 0.0, 1.0};
  }

  const ManifoldDesc& manifold() const override { return mani_; }
  const ProxDesc& prox() const override { return prox_; }
  double f(const Matrix& X) const override {
    return -(A_.transpose() * X).squaredNorm();
  }
  Matrix fgrad(const Matrix& X) const override {
    return -2.0 * (A_ * (A_.transpose() * X));
  }
  Matrix Aop(const Matrix& X) const override { return X; }
  Matrix Aadj(const Matrix&, const Matrix& Y) const override { return Y; }
  std::optional<Lipschitz> lipschitz() const override { return lip_; }

  const Matrix& data() const { return A_; }

 private:
  Matrix A_;
  ManifoldDesc mani_;
  ProxDesc prox_;
  Lipschitz lip_;
};

/// Fair principal component analysis over m groups of data columns:
///   min_{X in St(d,r)} max_{y in simplex}  sum_i y_i * (-||A_i' X||_F^2),
/// i.e. f = 0, A(X)_i = -||A_i' X||_F^2 with A_i the columns of group i, and
/// h the simplex indicator (h* = max).  With one column per group this is the
/// min-max variance problem over individual samples.
class FpcaProblem : public Problem {
 public:
  /// Data is d-by-N; group_of_col maps each column to a group id in [0, m).
  /// The default puts every column in its own group (m = N).
  FpcaProblem(Matrix data, int r, std::vector<int> group_of_col = {})
      : A_(std::move(data)), group_(std::move(group_of_col)) {
    const int N = int(A_.cols());
    if (group_.empty()) {
      group_.resize(N);
      for (int j = 0; j < N; ++j) group_[j] = j;
    }
    if (int(group_.size()) != N)
      throw std::invalid_argument("FpcaProblem: group map size mismatch");
    int m = 0;
    for (int g : group_) {
      if (g < 0) throw std::invalid_argument("FpcaProblem: negative group id");
      m = std::max(m, g + 1);
    }
    if (r <= 0 || r > A_.rows())
      throw std::invalid_argument("FpcaProblem: bad subspace dimension");
    mani_ = ManifoldDesc{ManifoldKind::Stiefel, int(A_.rows()), r};
    prox_ = ProxDesc{ProxFamily::Simplex, 0.0, m, 1};
  }

  const ManifoldDesc& manifold() const override { return mani_; }
  const ProxDesc& prox() const override { return prox_; }
  double f(const Matrix&) const override { return 0.0; }
  Matrix fgrad(const Matrix& X) const override {
    return Matrix::Zero(X.rows(), X.cols());
  }
  Matrix Aop(const Matrix& X) const override {
    Matrix B = A_.transpose() * X;  // N x r
    Matrix out = Matrix::Zero(prox_.rows, 1);
    for (Eigen::Index j = 0; j < B.rows(); ++j)
      out(group_[size_t(j)], 0) -= B.row(j).squaredNorm();
    return out;
  }
  Matrix Aadj(const Matrix& X, const Matrix& Y) const override {
    Matrix B = A_.transpose() * X;  // N x r
    for (Eigen::Index j = 0; j < B.rows(); ++j)
      B.row(j) *= -2.0 * Y(group_[size_t(j)], 0);
    return A_ * B;
  }

  const Matrix& data() const { return A_; }

 private:
  Matrix A_;
  std::vector<int> group_;
  ManifoldDesc mani_;
  ProxDesc prox_;
};

/// Sparse spectral clustering on the Grassmannian:
///   min_{span(X), X in St(N,m)}  <L, X X'> + mu ||X X'||_1,
/// with A(X) = X X' and h the indicator of the mu-box on N-by-N matrices.
class SscProblem : public Problem {
 public:
  SscProblem(const Matrix& laplacian, int m, double mu)
      : L_((laplacian + laplacian.transpose()) * 0.5),
        mani_{ManifoldKind::Grassmann, int(L_.rows()), m},
        prox_{ProxFamily::LinfBall, mu, int(L_.rows()), int(L_.rows())} {
    if (L_.rows() != L_.cols())
      throw std::invalid_argument("SscProblem: Laplacian must be square");
    if (m <= 0 || m >= L_.rows() || !(mu >= 0.0))
      throw std::invalid_argument("SscProblem: bad cluster count or mu");
    Eigen::SelfAdjointEigenSolver<Matrix> es(L_);
    const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
    lip_ = Lipschitz{2.0 * lmax, 2.0, 2.0, 2.0};
  }

  const ManifoldDesc& manifold() const override { return mani_; }
  const ProxDesc& prox() const override { return prox_; }
  double f(const Matrix& X) const override {
    return (X.transpose() * (L_ * X)).trace();
  }
  Matrix fgrad(const Matrix& X) const override { return 2.0 * (L_ * X); }
  Matrix Aop(const Matrix& X) const override { return X * X.transpose(); }
  Matrix Aadj(const Matrix& X, const Matrix& Y) const override {
    return (Y + Y.transpose()) * X;
  }
  std::optional<Lipschitz> lipschitz() const override { return lip_; }

  bool has_projector_form() const override { return true; }
  Matrix projector_grad(const Matrix&, const Matrix& Yh) const override {
    return L_ + (Yh + Yh.transpose()) * 0.5;
  }

  const Matrix& laplacian() const { return L_; }

 private:
  Matrix L_;
  ManifoldDesc mani_;
  ProxDesc prox_;
  Lipschitz lip_;
};

}  // namespace rada
