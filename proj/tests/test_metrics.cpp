#include <catch2/catch_amalgamated.hpp>

#include "rada/data.hpp"
#include "rada/metrics.hpp"

#include <cmath>
#include <random>
#include <vector>

using rada::Matrix;

TEST_CASE("normalized variance is 1 on the dominant eigenspace") {
  Matrix A = rada::gen_gaussian_points(6, 8, 61);
  Eigen::SelfAdjointEigenSolver<Matrix> es(A * A.transpose());
  Matrix top(6, 2);
  top.col(0) = es.eigenvectors().col(5);
  top.col(1) = es.eigenvectors().col(4);
  REQUIRE(std::abs(rada::normalized_variance(A, top, 2) - 1.0) <= 1e-12);
}

TEST_CASE("normalized variance hand value") {
  Matrix A = Matrix::Zero(3, 3);
  A(0, 0) = std::sqrt(3.0);
  A(1, 1) = std::sqrt(2.0);
  A(2, 2) = 1.0;
  Matrix Xhat = Matrix::Zero(3, 2);
  Xhat(0, 0) = 1.0;
  Xhat(2, 1) = 1.0;
  // Captures eigenvalues {3, 1} of the best-possible {3, 2}: 4/5.
  REQUIRE(std::abs(rada::normalized_variance(A, Xhat, 2) - 0.8) <= 1e-12);
  REQUIRE_THROWS_AS(rada::normalized_variance(A, Xhat, 0),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(rada::normalized_variance(A, Xhat, 4),
                    std::invalid_argument);
}

TEST_CASE("sparsity percentage") {
  REQUIRE(std::abs(rada::sparsity_percent(Matrix::Identity(3, 3)) -
                   200.0 / 3.0) <= 1e-12);
  Matrix X(3, 2);
  X << 1.0, 2e-6, -3.0, 0.0, 4.0, 5.0;
  REQUIRE(std::abs(rada::sparsity_percent(X) - 100.0 / 3.0) <= 1e-12);
  Matrix dense = Matrix::Constant(4, 4, 0.1);
  REQUIRE(rada::sparsity_percent(dense) == 0.0);
  // The threshold is a parameter, not a constant.
  Matrix tiny = Matrix::Constant(2, 2, 1e-3);
  REQUIRE(rada::sparsity_percent(tiny, 1e-2) == 100.0);
}

namespace {

Matrix two_clouds() {
  std::mt19937_64 gen(62);
  std::normal_distribution<double> nd(0.0, 0.05);
  Matrix P(8, 2);
  for (int i = 0; i < 4; ++i) P.row(i) << 10.0 + nd(gen), 0.1 + nd(gen);
  for (int i = 4; i < 8; ++i) P.row(i) << 0.1 + nd(gen), 10.0 + nd(gen);
  return P;
}

double labeling_sse(const Matrix& points, const std::vector<int>& labels,
                    int k) {
  Matrix X = points;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double nrm = X.row(i).norm();
    if (nrm > 0.0) X.row(i) /= nrm;
  }
  Matrix C = Matrix::Zero(k, X.cols());
  std::vector<long> cnt(size_t(k), 0);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    C.row(labels[size_t(i)]) += X.row(i);
    ++cnt[size_t(labels[size_t(i)])];
  }
  for (int c = 0; c < k; ++c)
    if (cnt[size_t(c)] > 0) C.row(c) /= double(cnt[size_t(c)]);
  double sse = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    sse += (X.row(i) - C.row(labels[size_t(i)])).squaredNorm();
  return sse;
}

}  // namespace

TEST_CASE("k-means separates two well-separated clouds") {
  Matrix P = two_clouds();
  std::vector<int> lab = rada::kmeans(P, 2, 10, 63);
  for (int i = 1; i < 4; ++i) REQUIRE(lab[size_t(i)] == lab[0]);
  for (int i = 5; i < 8; ++i) REQUIRE(lab[size_t(i)] == lab[4]);
  REQUIRE(lab[0] != lab[4]);
  REQUIRE(rada::kmeans(P, 2, 10, 63) == lab);  // deterministic under a seed
  REQUIRE_THROWS_AS(rada::kmeans(P, 0, 10, 63), std::invalid_argument);
  REQUIRE_THROWS_AS(rada::kmeans(P, 9, 10, 63), std::invalid_argument);
}

TEST_CASE("k-means beats random labelings on within-cluster scatter") {
  Matrix P = two_clouds();
  const double sse = labeling_sse(P, rada::kmeans(P, 2, 10, 64), 2);
  std::mt19937_64 gen(65);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> rnd(8);
    for (auto& v : rnd) v = coin(gen);
    REQUIRE(sse <= labeling_sse(P, rnd, 2) + 1e-12);
  }
}

TEST_CASE("normalized mutual information reference cases") {
  std::vector<int> a{0, 0, 1, 1};
  REQUIRE(std::abs(rada::nmi(a, a) - 1.0) <= 1e-12);
  REQUIRE(std::abs(rada::nmi(a, {1, 1, 0, 0}) - 1.0) <= 1e-12);  // renamed
  REQUIRE(rada::nmi({0, 0, 0, 0}, {0, 1, 0, 1}) == 0.0);  // one side constant
  REQUIRE(rada::nmi({2, 2, 2}, {5, 5, 5}) == 1.0);  // same trivial partition
  REQUIRE(rada::nmi(a, {0, 1, 0, 1}) <= 1e-12);     // independent labelings
  REQUIRE(rada::nmi(a, {0, 1, 1, 1}) == rada::nmi({0, 1, 1, 1}, a));
  REQUIRE_THROWS_AS(rada::nmi(a, {0, 1}), std::invalid_argument);
  REQUIRE_THROWS_AS(rada::nmi({}, {}), std::invalid_argument);
}

TEST_CASE("normalized mutual information hand value") {
  // a = (0,0,1,1), b = (0,1,1,1): joint counts {(0,0):1, (0,1):1, (1,1):2}.
  const double ha = std::log(2.0);
  const double hb = 0.25 * std::log(4.0) + 0.75 * std::log(4.0 / 3.0);
  const double mi = 0.25 * std::log(2.0) + 0.25 * std::log(2.0 / 3.0) +
                    0.5 * std::log(4.0 / 3.0);
  REQUIRE(std::abs(rada::nmi({0, 0, 1, 1}, {0, 1, 1, 1}) -
                   mi / std::sqrt(ha * hb)) <= 1e-12);
}

TEST_CASE("clustering an indicator solution recovers the partition") {
  Matrix Xhat = Matrix::Zero(9, 3);
  std::vector<int> truth(9);
  for (int i = 0; i < 9; ++i) {
    truth[size_t(i)] = i / 3;
    Xhat(i, i / 3) = 1.0;
  }
  std::vector<int> lab = rada::cluster_from_solution(Xhat, 3, 10, 66);
  REQUIRE(std::abs(rada::nmi(lab, truth) - 1.0) <= 1e-12);
}
