#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rada/manifold.hpp"

namespace rada {

/// Euclidean projection of a vector onto the probability simplex
/// { x : x >= 0, sum x = 1 }, by the sort-and-threshold rule.
inline Vector project_simplex(const Vector& v) {
  const Eigen::Index m = v.size();
  if (m == 0) throw std::invalid_argument("project_simplex: empty input");
  std::vector<double> u(v.data(), v.data() + m);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, tau = 0.0;
  int rho = 0;
  double css_at_rho = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    css += u[j];
    if (u[j] - (css - 1.0) / double(j + 1) > 0.0) {
      rho = int(j + 1);
      css_at_rho = css;
    }
  }
  tau = (css_at_rho - 1.0) / double(rho);
  return (v.array() - tau).max(0.0).matrix();
}

/// Families of the concave regularizer h in the saddle objective
/// f(x) + <A(x), y> - h(y).  Both are indicators of a convex set, so h* is a
/// support function and prox_h is a projection independent of the prox scale.
enum class ProxFamily {
  LinfBall,  ///< indicator of { Y : |Y_ij| <= mu }, conjugate mu * ||.||_1
  Simplex    ///< indicator of the probability simplex, conjugate max_i(.)
};

/// Descriptor of the dual regularizer: family plus the shape of dual
/// variables (Simplex duals are m-by-1 column vectors).
struct ProxDesc {
  ProxFamily family = ProxFamily::LinfBall;
  double mu = 1.0;  ///< box half-width (LinfBall only)
  int rows = 0;
  int cols = 1;

  /// Radius R = sup { ||y||_F : y in dom h }.
  double radius() const {
    if (family == ProxFamily::LinfBall)
      return mu * std::sqrt(double(rows) * double(cols));
    return 1.0;
  }
};

/// prox of t*h at v.  h is an indicator here, so this is the projection onto
/// dom h and does not depend on t.
inline Matrix prox_h(const ProxDesc& h, const Matrix& v, double /*t*/ = 1.0) {
  if (v.rows() != h.rows || v.cols() != h.cols)
    throw std::invalid_argument("prox_h: bad input shape");
  if (h.family == ProxFamily::LinfBall)
    return v.array().min(h.mu).max(-h.mu).matrix();
  return project_simplex(Vector(v.col(0)));
}

/// Value of the conjugate h* at u (the support function of dom h).
inline double conj_value(const ProxDesc& h, const Matrix& u) {
  if (h.family == ProxFamily::LinfBall) return h.mu * u.cwiseAbs().sum();
  return u.maxCoeff();
}

/// prox of t*h* at v, by a direct per-family algorithm (not the Moreau
/// decomposition, so identities against prox_h exercise independent code).
///
/// LinfBall: componentwise soft-threshold at level t*mu.
/// Simplex:  prox of t*max(.), by water-filling: p = min(v, tau) with tau
///           solving sum_i (v_i - tau)_+ = t.
inline Matrix prox_h_conj(const ProxDesc& h, const Matrix& v, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("prox_h_conj: need t > 0");
  if (v.rows() != h.rows || v.cols() != h.cols)
    throw std::invalid_argument("prox_h_conj: bad input shape");
  if (h.family == ProxFamily::LinfBall) {
    const double lvl = t * h.mu;
    return v.array().sign() * (v.array().abs() - lvl).max(0.0);
  }
  const Eigen::Index m = v.rows();
  std::vector<double> u(v.data(), v.data() + m);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, tau = 0.0;
  for (Eigen::Index k = 1; k <= m; ++k) {
    css += u[k - 1];
    tau = (css - t) / double(k);
    if (k == m || tau >= u[k]) break;
  }
  return v.array().min(tau).matrix();
}

/// Moreau envelope of t*h at v:  min_p h(p) + ||v - p||^2 / (2t).
inline double moreau_env_value(const ProxDesc& h, const Matrix& v, double t) {
  Matrix p = prox_h(h, v, t);
  return (v - p).squaredNorm() / (2.0 * t);
}

/// Moreau envelope of t*h* at v:  min_p h*(p) + ||v - p||^2 / (2t).
inline double moreau_env_conj_value(const ProxDesc& h, const Matrix& v,
                                    double t) {
  Matrix p = prox_h_conj(h, v, t);
  return conj_value(h, p) + (v - p).squaredNorm() / (2.0 * t);
}

/// Gradient of the Moreau envelope of t*h* at v.
///
/// Computed by two independent routes,
///   (v - prox_{t h*}(v)) / t     and     prox_h(v / t),
/// which must agree; a discrepancy beyond 1e-10 (relative to the gradient
/// scale) indicates an arithmetic bug and raises an error.  The projection
/// route is returned.
inline Matrix moreau_env_conj_grad(const ProxDesc& h, const Matrix& v,
                                   double t) {
  Matrix r1 = (v - prox_h_conj(h, v, t)) / t;
  Matrix r2 = prox_h(h, v / t);
  const double scale = std::max(1.0, r2.cwiseAbs().maxCoeff());
  if (!((r1 - r2).cwiseAbs().maxCoeff() <= 1e-10 * scale))
    throw std::runtime_error(
        "moreau_env_conj_grad: gradient routes disagree beyond 1e-10");
  return r2;
}

/// Gradient of the Moreau envelope of t*h at v, again by two routes:
/// (v - prox_{t h}(v)) / t  versus  prox_{(1/t) h*}(v / t).
inline Matrix moreau_env_grad(const ProxDesc& h, const Matrix& v, double t) {
  Matrix r1 = (v - prox_h(h, v, t)) / t;
  Matrix r2 = prox_h_conj(h, v / t, 1.0 / t);
  const double scale = std::max(1.0, r1.cwiseAbs().maxCoeff());
  if (!((r1 - r2).cwiseAbs().maxCoeff() <= 1e-10 * scale))
    throw std::runtime_error(
        "moreau_env_grad: gradient routes disagree beyond 1e-10");
  return r1;
}

/// Minimizer of  p |-> M_{lam h*}(p) + (sigma/2) ||p - v||^2,
/// where M_{lam h*} is the Moreau envelope of lam*h*.  Closed form:
///   p = (lam sigma v + prox_{(lam + 1/sigma) h*}(v)) / (lam sigma + 1).
inline Matrix prox_of_moreau_env(const ProxDesc& h, double lam, double sigma,
                                 const Matrix& v) {
  if (!(lam > 0.0) || !(sigma > 0.0))
    throw std::invalid_argument("prox_of_moreau_env: need lam, sigma > 0");
  return (lam * sigma * v + prox_h_conj(h, v, lam + 1.0 / sigma)) /
         (lam * sigma + 1.0);
}

/// Canonical dual initializer: the projection of the all-zero matrix onto
/// dom h (zero for a box, the uniform vector for the simplex).
inline Matrix dual_init(const ProxDesc& h) {
  return prox_h(h, Matrix::Zero(h.rows, h.cols));
}

}  // namespace rada
