#include <catch2/catch_amalgamated.hpp>

#include "rada/prox.hpp"

#include <cmath>
#include <random>
#include <vector>

using rada::Matrix;
using rada::ProxDesc;
using rada::ProxFamily;
using rada::Vector;

namespace {

Matrix randn(int n, int p, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix G(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) G(i, j) = nd(gen);
  return G;
}

// Reference simplex projection by support enumeration: try every support set,
// keep the unique KKT-feasible candidate.  Exponential, for tiny sizes only.
Vector simplex_bruteforce(const Vector& v) {
  const int m = int(v.size());
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    double sum = 0.0;
    int cnt = 0;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) {
        sum += v(i);
        ++cnt;
      }
    const double tau = (sum - 1.0) / cnt;
    bool ok = true;
    for (int i = 0; i < m; ++i) {
      const bool in = mask & (1u << i);
      if (in && v(i) - tau < -1e-12) ok = false;
      if (!in && v(i) - tau > 1e-12) ok = false;
    }
    if (ok) {
      Vector x = Vector::Zero(m);
      for (int i = 0; i < m; ++i)
        if (mask & (1u << i)) x(i) = v(i) - tau;
      return x;
    }
  }
  throw std::logic_error("no feasible support found");
}

}  // namespace

TEST_CASE("simplex projection hand values") {
  Vector v(2);
  v << 0.5, 0.5;
  REQUIRE((rada::project_simplex(v) - v).cwiseAbs().maxCoeff() <= 1e-15);

  v << 2.0, 0.0;
  Vector w = rada::project_simplex(v);
  REQUIRE(std::abs(w(0) - 1.0) <= 1e-15);
  REQUIRE(std::abs(w(1)) <= 1e-15);

  v << -1.0, -2.0;
  w = rada::project_simplex(v);
  REQUIRE(std::abs(w(0) - 1.0) <= 1e-15);
  REQUIRE(std::abs(w(1)) <= 1e-15);

  Vector u(3);
  u << 1.0, 1.0, 1.0;
  w = rada::project_simplex(u);
  for (int i = 0; i < 3; ++i) REQUIRE(std::abs(w(i) - 1.0 / 3.0) <= 1e-15);

  REQUIRE_THROWS_AS(rada::project_simplex(Vector()), std::invalid_argument);
}

TEST_CASE("simplex projection matches support enumeration") {
  std::mt19937_64 gen(99);
  std::normal_distribution<double> nd(0.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 2 + int(gen() % 5);  // 2..6
    Vector v(m);
    for (int i = 0; i < m; ++i) v(i) = nd(gen);
    Vector fast = rada::project_simplex(v);
    Vector slow = simplex_bruteforce(v);
    REQUIRE((fast - slow).cwiseAbs().maxCoeff() <= 1e-12);
    REQUIRE(std::abs(fast.sum() - 1.0) <= 1e-12);
    REQUIRE(fast.minCoeff() >= -1e-15);
  }
}

TEST_CASE("box prox clamps and ignores the prox scale") {
  ProxDesc h{ProxFamily::LinfBall, 0.25, 3, 1};
  Matrix v(3, 1);
  v << 0.5, -0.1, 0.2;
  Matrix p = rada::prox_h(h, v);
  REQUIRE(p(0, 0) == 0.25);
  REQUIRE(p(1, 0) == -0.1);
  REQUIRE(p(2, 0) == 0.2);
  REQUIRE(rada::prox_h(h, v, 5.0) == p);
  REQUIRE_THROWS_AS(rada::prox_h(h, Matrix::Zero(2, 2)),
                    std::invalid_argument);
}

TEST_CASE("conjugate values are the support functions") {
  ProxDesc box{ProxFamily::LinfBall, 2.0, 2, 1};
  Matrix u(2, 1);
  u << 1.0, -3.0;
  REQUIRE(rada::conj_value(box, u) == 8.0);  // mu * ||u||_1

  ProxDesc sim{ProxFamily::Simplex, 1.0, 3, 1};
  Matrix s(3, 1);
  s << -2.0, 0.5, 0.25;
  REQUIRE(rada::conj_value(sim, s) == 0.5);  // max entry
}

TEST_CASE("conjugate prox hand values") {
  // Box: soft-threshold at level t*mu.
  ProxDesc box{ProxFamily::LinfBall, 0.5, 3, 1};
  Matrix v(3, 1);
  v << 2.0, -0.3, 0.7;
  Matrix p = rada::prox_h_conj(box, v, 1.0);
  REQUIRE(std::abs(p(0, 0) - 1.5) <= 1e-15);
  REQUIRE(p(1, 0) == 0.0);
  REQUIRE(std::abs(p(2, 0) - 0.2) <= 1e-15);

  // Simplex: water-filling gives p = min(v, tau) with tau solving
  // sum_i (v_i - tau)_+ = t.
  ProxDesc sim{ProxFamily::Simplex, 1.0, 3, 1};
  Matrix w(3, 1);
  w << 3.0, 1.0, 0.0;
  Matrix q = rada::prox_h_conj(sim, w, 1.0);
  REQUIRE(std::abs(q(0, 0) - 2.0) <= 1e-14);
  REQUIRE(std::abs(q(1, 0) - 1.0) <= 1e-14);
  REQUIRE(std::abs(q(2, 0) - 0.0) <= 1e-14);

  REQUIRE_THROWS_AS(rada::prox_h_conj(box, v, 0.0), std::invalid_argument);
}

TEST_CASE("envelope of the box conjugate is the Huber function") {
  // M_{t h*}(v) for h the box indicator equals the elementwise Huber value:
  // v^2 / (2 t) inside |v| <= t mu, else mu |v| - t mu^2 / 2.
  ProxDesc box{ProxFamily::LinfBall, 0.5, 1, 1};
  Matrix v(1, 1);
  v << 2.0;
  const double got = rada::moreau_env_conj_value(box, v, 2.0);
  REQUIRE(std::abs(got - 0.75) <= 1e-14);  // 0.5*2 - 2*0.25/2
  v << 0.5;                                // inside the quadratic zone
  REQUIRE(std::abs(rada::moreau_env_conj_value(box, v, 2.0) - 0.0625) <=
          1e-14);
}

TEST_CASE("Moreau decomposition ties the two prox routines together") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> ud(0.1, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double t = ud(gen);
    {
      ProxDesc h{ProxFamily::LinfBall, 0.3 + 0.1 * (trial % 7), 4, 2};
      Matrix v = 3.0 * randn(4, 2, 1000 + trial);
      Matrix lhs = rada::prox_h_conj(h, v, t);
      Matrix rhs = v - t * rada::prox_h(h, v / t);
      REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
    }
    {
      ProxDesc h{ProxFamily::Simplex, 1.0, 5, 1};
      Matrix v = 3.0 * randn(5, 1, 2000 + trial);
      Matrix lhs = rada::prox_h_conj(h, v, t);
      Matrix rhs = v - t * rada::prox_h(h, v / t);
      REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("envelope pair sums to the quadratic") {
  // M_{t h}(v) + M_{(1/t) h*}(v / t) == ||v||^2 / (2 t).
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> ud(0.2, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double t = ud(gen);
    for (int fam = 0; fam < 2; ++fam) {
      ProxDesc h = fam == 0 ? ProxDesc{ProxFamily::LinfBall, 0.7, 3, 2}
                            : ProxDesc{ProxFamily::Simplex, 1.0, 6, 1};
      Matrix v = 2.0 * randn(h.rows, h.cols, 3000 + 2 * trial + fam);
      const double lhs = rada::moreau_env_value(h, v, t) +
                         rada::moreau_env_conj_value(h, v / t, 1.0 / t);
      const double rhs = v.squaredNorm() / (2.0 * t);
      REQUIRE(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
    }
  }
}

TEST_CASE("envelope gradients match finite differences") {
  for (int fam = 0; fam < 2; ++fam) {
    ProxDesc h = fam == 0 ? ProxDesc{ProxFamily::LinfBall, 0.4, 3, 1}
                          : ProxDesc{ProxFamily::Simplex, 1.0, 3, 1};
    const double t = 1.7;
    Matrix v = randn(3, 1, 40 + fam);
    Matrix g = rada::moreau_env_conj_grad(h, v, t);
    const double eps = 1e-6;
    for (int i = 0; i < 3; ++i) {
      Matrix vp = v, vm = v;
      vp(i, 0) += eps;
      vm(i, 0) -= eps;
      const double fd = (rada::moreau_env_conj_value(h, vp, t) -
                         rada::moreau_env_conj_value(h, vm, t)) /
                        (2.0 * eps);
      REQUIRE(std::abs(fd - g(i, 0)) <= 1e-6);
    }
    // The primal-envelope gradient route agrees with its own alternative.
    Matrix gp = rada::moreau_env_grad(h, v, t);
    Matrix ref = (v - rada::prox_h(h, v, t)) / t;
    REQUIRE((gp - ref).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("prox of the envelope satisfies its stationarity condition") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> ud(0.2, 4.0);
  for (int fam = 0; fam < 2; ++fam) {
    ProxDesc h = fam == 0 ? ProxDesc{ProxFamily::LinfBall, 0.6, 4, 1}
                          : ProxDesc{ProxFamily::Simplex, 1.0, 4, 1};
    for (int trial = 0; trial < 25; ++trial) {
      const double lam = ud(gen), sigma = ud(gen);
      Matrix v = 2.5 * randn(4, 1, 500 + 10 * fam + trial);
      Matrix p = rada::prox_of_moreau_env(h, lam, sigma, v);
      // 0 == grad M_{lam h*}(p) + sigma (p - v)
      Matrix g = rada::moreau_env_conj_grad(h, p, lam) + sigma * (p - v);
      REQUIRE(g.cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
  REQUIRE_THROWS_AS(
      rada::prox_of_moreau_env({ProxFamily::LinfBall, 1.0, 2, 1}, 0.0, 1.0,
                               Matrix::Zero(2, 1)),
      std::invalid_argument);
}

TEST_CASE("dual initializer and radius") {
  ProxDesc box{ProxFamily::LinfBall, 2.0, 3, 4};
  Matrix y0 = rada::dual_init(box);
  REQUIRE(y0 == Matrix::Zero(3, 4));
  REQUIRE(std::abs(box.radius() - 2.0 * std::sqrt(12.0)) <= 1e-15);

  ProxDesc sim{ProxFamily::Simplex, 1.0, 5, 1};
  Matrix s0 = rada::dual_init(sim);
  for (int i = 0; i < 5; ++i) REQUIRE(s0(i, 0) == 0.2);
  REQUIRE(sim.radius() == 1.0);
}
