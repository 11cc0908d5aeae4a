#include <catch2/catch_amalgamated.hpp>

#include "rada/manifold.hpp"

#include <cmath>
#include <limits>
#include <random>

using rada::Matrix;
using rada::ManifoldDesc;
using rada::ManifoldKind;

namespace {

Matrix randn(int n, int p, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix G(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) G(i, j) = nd(gen);
  return G;
}

double orth_err(const Matrix& X) {
  return (X.transpose() * X - Matrix::Identity(X.cols(), X.cols()))
      .cwiseAbs()
      .maxCoeff();
}

}  // namespace

TEST_CASE("random_point produces orthonormal, reproducible points") {
  for (auto kind : {ManifoldKind::Stiefel, ManifoldKind::Grassmann}) {
    for (auto [n, p] : {std::pair{5, 2}, std::pair{9, 4}, std::pair{12, 1}}) {
      ManifoldDesc M{kind, n, p};
      Matrix X = rada::random_point(M, 42);
      REQUIRE(X.rows() == n);
      REQUIRE(X.cols() == p);
      REQUIRE(orth_err(X) <= 1e-12);
      Matrix X2 = rada::random_point(M, 42);
      REQUIRE(X == X2);  // bitwise determinism
      Matrix X3 = rada::random_point(M, 43);
      REQUIRE((X - X3).cwiseAbs().maxCoeff() > 1e-6);
    }
  }
}

TEST_CASE("tangent projection on the sphere (p = 1) removes the radial part") {
  // Stiefel with p = 1 is the unit sphere: P_x g = g - x (x' g).
  ManifoldDesc M{ManifoldKind::Stiefel, 2, 1};
  Matrix X(2, 1), G(2, 1);
  X << 1.0, 0.0;
  G << 3.0, 4.0;
  Matrix V = rada::tangent_project(M, X, G);
  REQUIRE(V(0, 0) == 0.0);
  REQUIRE(V(1, 0) == 4.0);

  ManifoldDesc Mg{ManifoldKind::Grassmann, 2, 1};
  Matrix Vg = rada::tangent_project(Mg, X, G);
  REQUIRE((V - Vg).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("tangent projection at the identity keeps the skew part") {
  // At X = I the Stiefel tangent space is the skew-symmetric matrices, so the
  // projection of G is its skew part (G - G')/2.
  ManifoldDesc M{ManifoldKind::Stiefel, 2, 2};
  Matrix X = Matrix::Identity(2, 2), G(2, 2);
  G << 1.0, 2.0, 3.0, 4.0;
  Matrix V = rada::tangent_project(M, X, G);
  Matrix want(2, 2);
  want << 0.0, -0.5, 0.5, 0.0;
  REQUIRE((V - want).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("tangent projection is idempotent, self-adjoint, and constrained") {
  for (auto kind : {ManifoldKind::Stiefel, ManifoldKind::Grassmann}) {
    ManifoldDesc M{kind, 8, 3};
    Matrix X = rada::random_point(M, 7);
    Matrix G1 = randn(8, 3, 11), G2 = randn(8, 3, 12);
    Matrix V1 = rada::tangent_project(M, X, G1);
    Matrix V2 = rada::tangent_project(M, X, G2);

    // Idempotence.
    Matrix VV = rada::tangent_project(M, X, V1);
    REQUIRE((VV - V1).cwiseAbs().maxCoeff() <= 1e-12);

    // Self-adjointness: <P g1, g2> == <g1, P g2>.
    const double a = (V1.array() * G2.array()).sum();
    const double b = (G1.array() * V2.array()).sum();
    REQUIRE(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));

    // Tangency constraint.
    Matrix C = X.transpose() * V1;
    if (kind == ManifoldKind::Stiefel)
      REQUIRE((C + C.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    else
      REQUIRE(C.cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("retraction of a zero step returns the point bitwise") {
  ManifoldDesc M{ManifoldKind::Stiefel, 6, 2};
  Matrix X = rada::random_point(M, 3);
  Matrix R = rada::retract(M, X, Matrix::Zero(6, 2));
  REQUIRE(R == X);
}

TEST_CASE("retraction hand value on the sphere") {
  // X = e1, V = e2: Q factor of (1, 1)' is the normalized vector.
  ManifoldDesc M{ManifoldKind::Stiefel, 2, 1};
  Matrix X(2, 1), V(2, 1);
  X << 1.0, 0.0;
  V << 0.0, 1.0;
  Matrix R = rada::retract(M, X, V);
  const double s = 1.0 / std::sqrt(2.0);
  REQUIRE(std::abs(R(0, 0) - s) <= 1e-15);
  REQUIRE(std::abs(R(1, 0) - s) <= 1e-15);
}

TEST_CASE("QR sign convention keeps the triangular factor positive") {
  // thin_qr_positive(-e1) must return -e1 (Q = -e1, R = 1 > 0).
  Matrix S(2, 1);
  S << -1.0, 0.0;
  Matrix Q = rada::detail::thin_qr_positive(S);
  REQUIRE(std::abs(Q(0, 0) + 1.0) <= 1e-15);
  REQUIRE(std::abs(Q(1, 0)) <= 1e-15);
}

TEST_CASE("retraction agrees with X + tV to second order") {
  for (auto kind : {ManifoldKind::Stiefel, ManifoldKind::Grassmann}) {
    ManifoldDesc M{kind, 7, 3};
    Matrix X = rada::random_point(M, 21);
    Matrix V = rada::tangent_project(M, X, randn(7, 3, 22));
    V /= V.norm();
    for (double t : {1e-2, 1e-3}) {
      Matrix R = rada::retract(M, X, t * V);
      REQUIRE(orth_err(R) <= 1e-12);
      const double err = (R - (X + t * V)).norm();
      REQUIRE(err <= 2.0 * t * t);
    }
  }
}

TEST_CASE("retraction rejects degenerate and non-finite steps") {
  ManifoldDesc M{ManifoldKind::Stiefel, 2, 1};
  Matrix X(2, 1);
  X << 1.0, 0.0;
  Matrix V = -X;  // X + V == 0, rank deficient
  REQUIRE_THROWS_AS(rada::retract(M, X, V), std::runtime_error);
  Matrix W(2, 1);
  W << std::numeric_limits<double>::quiet_NaN(), 0.0;
  REQUIRE_THROWS_AS(rada::retract(M, X, W), std::runtime_error);
}

TEST_CASE("Stiefel projection returns the polar factor") {
  ManifoldDesc M{ManifoldKind::Stiefel, 2, 2};
  Matrix Y(2, 2);
  Y << 2.0, 0.0, 0.0, 3.0;
  Matrix P = rada::project_to_manifold(M, Y);
  REQUIRE((P - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-14);

  Y << 2.0, 0.0, 0.0, -3.0;
  P = rada::project_to_manifold(M, Y);
  Matrix want(2, 2);
  want << 1.0, 0.0, 0.0, -1.0;
  REQUIRE((P - want).cwiseAbs().maxCoeff() <= 1e-14);

  // Idempotence on points already orthonormal.
  Matrix X = rada::random_point(M, 5);
  REQUIRE((rada::project_to_manifold(M, X) - X).cwiseAbs().maxCoeff() <= 1e-13);

  REQUIRE_THROWS_AS(rada::project_to_manifold(M, Matrix::Zero(2, 2)),
                    std::runtime_error);
  REQUIRE_THROWS_AS(rada::project_to_manifold(M, Matrix::Zero(3, 2)),
                    std::invalid_argument);
}

TEST_CASE("Grassmann projection extracts the dominant invariant subspace") {
  ManifoldDesc M{ManifoldKind::Grassmann, 3, 2};
  Matrix Y = Matrix::Zero(3, 3);
  Y.diagonal() << 5.0, 3.0, 1.0;
  Matrix X = rada::project_to_manifold(M, Y);
  // Compare spans through the projector: X X' must equal diag(1, 1, 0).
  Matrix P = X * X.transpose();
  Matrix want = Matrix::Zero(3, 3);
  want(0, 0) = want(1, 1) = 1.0;
  REQUIRE((P - want).cwiseAbs().maxCoeff() <= 1e-12);
  REQUIRE(orth_err(X) <= 1e-12);

  Matrix Yg = Matrix::Zero(3, 3);
  Yg.diagonal() << 5.0, 3.0, 3.0;  // no gap after the 2nd eigenvalue
  REQUIRE_THROWS_AS(rada::project_to_manifold(M, Yg), std::runtime_error);
  REQUIRE_THROWS_AS(rada::project_to_manifold(M, Matrix::Zero(3, 2)),
                    std::invalid_argument);
}

TEST_CASE("Grassmann operations depend only on the span of the basis") {
  ManifoldDesc M{ManifoldKind::Grassmann, 6, 2};
  Matrix X = rada::random_point(M, 9);
  // Rotate the basis by an orthogonal 2x2 matrix: same subspace.
  Matrix Q(2, 2);
  const double c = std::cos(0.7), s = std::sin(0.7);
  Q << c, -s, s, c;
  Matrix XQ = X * Q;
  Matrix G = randn(6, 2, 10);
  Matrix V1 = rada::tangent_project(M, X, G);
  Matrix V2 = rada::tangent_project(M, XQ, G);
  REQUIRE((V1 - V2).cwiseAbs().maxCoeff() <= 1e-13);
}
