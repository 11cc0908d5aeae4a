#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rada/problem.hpp"
#include "rada/prox.hpp"
#include "rada/solver.hpp"

namespace rada {

/// Objective-stagnation stopping rule for the single-loop baselines: stop
/// when the prefix-minimum of the pushed values has improved by less than
/// tol over the last W pushes.
class WindowStop {
 public:
  WindowStop(double tol, int W) : tol_(tol), W_(size_t(W)) {}
  bool push(double v) {
    buf_.push_back(buf_.empty() ? v : std::min(v, buf_.back()));
    const size_t n = buf_.size();
    return n - 1 >= W_ && buf_[n - 1] > buf_[n - 1 - W_] - tol_;
  }

 private:
  double tol_;
  size_t W_;
  std::vector<double> buf_;
};

namespace detail {

/// Alternating Barzilai-Borwein trial stepsize with a gradient-scaled cap
/// and a positive floor; falls back to the cap when undefined.
inline double bb_step(long parity_index, const Matrix& s, const Matrix& v,
                      const Matrix& g_new, double zmin, double zmax) {
  const double sv = std::abs(s.cwiseProduct(v).sum());
  double cand;
  if (parity_index % 2 == 1) {
    cand = sv > 0.0 ? s.squaredNorm() / sv
                    : std::numeric_limits<double>::infinity();
  } else {
    const double vv = v.squaredNorm();
    cand = vv > 0.0 ? sv / vv : std::numeric_limits<double>::infinity();
  }
  const double gn = g_new.norm();
  const double cap =
      gn > 0.0 ? zmax / gn : std::numeric_limits<double>::infinity();
  const double z = std::max(std::min(cand, cap), zmin);
  return std::isfinite(z) ? z : zmax;
}

/// Backtracked Armijo search along the retracted ray x <- R_x(-step g).
/// On top of the caller's slack, a machine-precision guard proportional to
/// the merit magnitude is allowed, so bitwise-stationary iterates are
/// accepted.  If the budget is exhausted the current iterate is kept (the
/// step is stationary to machine precision).
template <class MeritFn>
inline void keep_iterate_linesearch(const ManifoldDesc& M, MeritFn&& merit,
                                    Matrix& x, double& fx, const Matrix& g,
                                    double zeta, double c1, double eta,
                                    double slack, int max_backtracks) {
  const double emach = std::numeric_limits<double>::epsilon();
  const double guard = 64.0 * emach * (1.0 + std::abs(fx));
  const double gn2 = g.squaredNorm();
  double step = zeta;
  for (int j = 0; j < max_backtracks; ++j) {
    Matrix xt = retract(M, x, -step * g);
    const double ft = merit(xt);
    if (ft - fx <= -c1 * step * gn2 + slack + guard) {
      x = xt;
      fx = ft;
      return;
    }
    step *= eta;
  }
}

}  // namespace detail

/// Result of a single-loop baseline run.
struct BaselineReport {
  Matrix x, y;
  long iters = 0;
  bool window_stopped = false;
  double phi_final = 0.0;
  double seconds = 0.0;
  /// Largest deviation of the ascent-step gradient identity (when checked).
  double max_identity_dev = 0.0;
  /// Largest optimality residual of the proximal splitting step (when
  /// applicable).
  double max_p_residual = 0.0;
  /// Largest distance of a dual iterate from dom h (when checked).
  double max_y_infeas = 0.0;
};

struct ArpgdaOptions {
  double eps = 1e-8;        ///< sets lam = eps / (2R) unless lam >= 0
  double lam = -1.0;
  double beta_coeff = 1.0;  ///< dual stepsize beta_k = coeff / k^beta_exp
  double beta_exp = 1.5;
  long max_iters = 20000;
  double window_tol = 1e-8;
  int window = 1000;
  double c1 = 1e-4, eta = 0.1;
  double zeta_min = 1e-10, zeta_max = 1e2, zeta_init = 1e-3;
  int max_backtracks = 60;
  bool check_invariants = true;
};

/// Alternating projected/Riemannian gradient descent-ascent: a backtracked
/// descent step on x |-> f(x) + <A(x), y_k> followed by the proximal dual
/// ascent step with a decaying dual stepsize.
inline BaselineReport run_arpgda(const Problem& P, Matrix x, Matrix y,
                                 const ArpgdaOptions& o) {
  const ManifoldDesc& M = P.manifold();
  const double lam = o.lam < 0.0 ? o.eps / (2.0 * P.R()) : o.lam;
  const auto t0 = std::chrono::steady_clock::now();
  double zeta = o.zeta_init;
  WindowStop ws(o.window_tol, o.window);
  BaselineReport rep;
  Matrix y_prev;
  double beta_prev = 0.0;
  auto merit = [&](const Matrix& xx) {
    return P.f(xx) + P.Aop(xx).cwiseProduct(y).sum();
  };
  long k = 1;
  for (; k <= o.max_iters; ++k) {
    const double beta = o.beta_coeff / std::pow(double(k), o.beta_exp);
    Matrix g = P.tproj(x, P.fgrad(x) + P.Aadj(x, y));
    if (o.check_invariants && k > 1) {
      Matrix gid = P.tproj(x, phi_k_grad(P, x, y_prev, lam, beta_prev));
      rep.max_identity_dev =
          std::max(rep.max_identity_dev, (g - gid).norm());
    }
    double fx = merit(x);
    Matrix xn = x;
    detail::keep_iterate_linesearch(M, merit, xn, fx, g, zeta, o.c1, o.eta,
                                    0.0, o.max_backtracks);
    Matrix yn = y_half(P, xn, y, lam, beta);
    Matrix gnew = P.tproj(xn, P.fgrad(xn) + P.Aadj(xn, y));
    zeta = detail::bb_step(k, xn - x, gnew - g, gnew, o.zeta_min, o.zeta_max);
    y_prev = y;
    beta_prev = beta;
    x = xn;
    y = yn;
    if (o.check_invariants) {
      rep.max_y_infeas =
          std::max(rep.max_y_infeas,
                   (y - prox_h(P.prox(), y)).cwiseAbs().maxCoeff());
    }
    if (ws.push(P.phi(x))) {
      rep.window_stopped = true;
      break;
    }
  }
  rep.x = std::move(x);
  rep.y = std::move(y);
  rep.iters = std::min(k, o.max_iters);
  rep.phi_final = P.phi(rep.x);
  rep.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

struct DsgmOptions {
  double lam_coeff = 1.0;  ///< smoothing lam_k = coeff / k^lam_exp
  double lam_exp = 1.0 / 3.0;
  long max_iters = 20000;
  double window_tol = 1e-8;
  int window = 1000;
  double c1 = 1e-4, eta = 0.1;
  double zeta_min = 1e-10, zeta_max = 1e2, zeta_init = 1e-3;
  int max_backtracks = 60;
};

/// Dual-smoothing gradient method: backtracked descent on the single
/// smoothed objective f(x) + M_{lam_k h*}(A(x)) with a decaying smoothing
/// parameter and no dual iterate.
inline BaselineReport run_dsgm(const Problem& P, Matrix x,
                               const DsgmOptions& o) {
  const ManifoldDesc& M = P.manifold();
  const ProxDesc& h = P.prox();
  const auto t0 = std::chrono::steady_clock::now();
  double zeta = o.zeta_init;
  WindowStop ws(o.window_tol, o.window);
  BaselineReport rep;
  long k = 1;
  for (; k <= o.max_iters; ++k) {
    const double lk = o.lam_coeff / std::pow(double(k), o.lam_exp);
    auto merit = [&](const Matrix& xx) {
      return P.f(xx) + moreau_env_conj_value(h, P.Aop(xx), lk);
    };
    auto grad = [&](const Matrix& xx) {
      return P.tproj(xx, P.fgrad(xx) +
                             P.Aadj(xx, prox_h(h, P.Aop(xx) / lk)));
    };
    Matrix g = grad(x);
    double fx = merit(x);
    Matrix xn = x;
    detail::keep_iterate_linesearch(M, merit, xn, fx, g, zeta, o.c1, o.eta,
                                    0.0, o.max_backtracks);
    Matrix gnew = grad(xn);
    zeta = detail::bb_step(k, xn - x, gnew - g, gnew, o.zeta_min, o.zeta_max);
    x = xn;
    if (ws.push(P.phi(x))) {
      rep.window_stopped = true;
      break;
    }
  }
  rep.x = std::move(x);
  rep.iters = std::min(k, o.max_iters);
  rep.phi_final = P.phi(rep.x);
  rep.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

struct RadmmOptions {
  double lam_coeff = 1.0;  ///< smoothing lam_k = coeff / k^lam_exp
  double lam_exp = 1.0 / 3.0;
  double sigma_coeff = 1.0;  ///< penalty sigma_k = coeff * k^sigma_exp
  double sigma_exp = 1.5;
  long max_iters = 20000;
  double window_tol = 1e-8;
  int window = 1000;
  double c1 = 1e-4, eta = 0.1;
  double zeta_min = 1e-10, zeta_max = 1e2, zeta_init = 1e-3;
  int max_backtracks = 60;
  bool check_invariants = true;
};

/// Riemannian ADMM on the splitting A(x) = p with a smoothed p-block:
/// a backtracked x-step on the augmented Lagrangian, the closed-form p-step
/// (minimizer of the smoothed conjugate envelope plus the quadratic), and a
/// multiplier ascent step.  Penalty grows and smoothing decays with k.
inline BaselineReport run_radmm(const Problem& P, Matrix x, Matrix y,
                                const RadmmOptions& o) {
  const ManifoldDesc& M = P.manifold();
  const ProxDesc& h = P.prox();
  const auto t0 = std::chrono::steady_clock::now();
  double zeta = o.zeta_init;
  WindowStop ws(o.window_tol, o.window);
  BaselineReport rep;
  Matrix p = prox_of_moreau_env(h, o.lam_coeff, o.sigma_coeff,
                                P.Aop(x) + y / o.sigma_coeff);
  long k = 1;
  for (; k <= o.max_iters; ++k) {
    const double lk = o.lam_coeff / std::pow(double(k), o.lam_exp);
    const double sk = o.sigma_coeff * std::pow(double(k), o.sigma_exp);
    auto merit = [&](const Matrix& xx) {
      Matrix Ax = P.Aop(xx);
      return P.f(xx) + y.cwiseProduct(Ax - p).sum() +
             0.5 * sk * (Ax - p).squaredNorm() +
             moreau_env_conj_value(h, p, lk);
    };
    auto grad = [&](const Matrix& xx) {
      return P.tproj(xx, P.fgrad(xx) +
                             P.Aadj(xx, y + sk * (P.Aop(xx) - p)));
    };
    Matrix g = grad(x);
    double fx = merit(x);
    Matrix xn = x;
    detail::keep_iterate_linesearch(M, merit, xn, fx, g, zeta, o.c1, o.eta,
                                    0.0, o.max_backtracks);
    Matrix gnew = grad(xn);
    zeta = detail::bb_step(k, xn - x, gnew - g, gnew, o.zeta_min, o.zeta_max);
    x = xn;
    Matrix v = P.Aop(x) + y / sk;
    p = prox_of_moreau_env(h, lk, sk, v);
    if (o.check_invariants) {
      Matrix res = (p - prox_h_conj(h, p, lk)) / lk + sk * (p - v);
      rep.max_p_residual =
          std::max(rep.max_p_residual, res.cwiseAbs().maxCoeff());
    }
    y = y + sk * (P.Aop(x) - p);
    if (ws.push(P.phi(x))) {
      rep.window_stopped = true;
      break;
    }
  }
  rep.x = std::move(x);
  rep.y = std::move(y);
  rep.iters = std::min(k, o.max_iters);
  rep.phi_final = P.phi(rep.x);
  rep.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

/// Symmetric Gauss-Seidel ADMM on the same splitting with penalty tied to
/// the smoothing width (sigma = 1/beta) and the p-block eliminated in
/// closed form.  With matching schedules its iterates coincide with the
/// adaptively smoothed scheme's up to round-off, so it shares RadaOptions
/// (the inner solver is the backtracked gradient descent) and the same
/// stall-driven width cascade.
inline RunReport run_sgs_admm(const Problem& P, Matrix x, Matrix y,
                              const RadaOptions& o) {
  const ManifoldDesc& M = P.manifold();
  const ProxDesc& h = P.prox();
  if (!(o.beta1 > 0.0))
    throw std::invalid_argument("run_sgs_admm: beta1 must be positive");
  const double lam = o.lam < 0.0 ? o.eps / (2.0 * P.R()) : o.lam;
  RunReport rep;
  rep.lam = lam;
  const auto t0 = std::chrono::steady_clock::now();
  const double R2 = P.R() * P.R();
  const double emach = std::numeric_limits<double>::epsilon();

  double beta1_cur = o.beta1;
  double beta_raw = o.beta1;
  double beta =
      std::min(std::max(beta_raw, o.beta_floor_mult * lam), o.beta1);
  std::vector<double> stall_hist;
  double zeta = o.zeta_init;
  RgsCert cert;

  long k = 1;
  for (; k <= o.max_iters; ++k) {
    const double beta_k = beta;
    Matrix yh0 = y_half(P, x, y, lam, beta);
    cert = check_rgs(P, x, yh0, o.gamma);
    double phi_x = 0.0, phi_k_x = 0.0;
    if (o.keep_trace) {
      phi_x = P.phi(x);
      phi_k_x = phi_k_value(P, x, y, lam, beta);
    }
    if (std::max(cert.gres, cert.yres) <= o.eps) {
      rep.converged = true;
      break;
    }
    const double sig = 1.0 / beta;
    auto pofx = [&](const Matrix& xx) {
      return prox_of_moreau_env(h, lam, sig, P.Aop(xx) + beta * y);
    };
    auto merit = [&](const Matrix& xx) {
      Matrix pp = pofx(xx);
      Matrix Ax = P.Aop(xx);
      return P.f(xx) + y.cwiseProduct(Ax - pp).sum() +
             0.5 * sig * (Ax - pp).squaredNorm() +
             moreau_env_conj_value(h, pp, lam);
    };
    auto grad = [&](const Matrix& xx) {
      Matrix pp = pofx(xx);
      return P.tproj(xx, P.fgrad(xx) +
                             P.Aadj(xx, y + sig * (P.Aop(xx) - pp)));
    };
    double fx = merit(x);
    Matrix g = grad(x);
    for (int t = 1; t <= o.T; ++t) {
      const double slack =
          std::min(2.0 * R2 * beta_raw + 64.0 * emach * (1.0 + std::abs(fx)),
                   2.0 * R2 * beta + 1e-12);
      Matrix xprev = x;
      detail::keep_iterate_linesearch(M, merit, x, fx, g, zeta, o.c1, o.eta,
                                      slack, o.max_backtracks);
      Matrix gnew = grad(x);
      zeta = detail::bb_step(t, x - xprev, gnew - g, gnew, o.zeta_min,
                             o.zeta_max);
      g = gnew;
    }
    Matrix p = pofx(x);
    Matrix ynew = y + sig * (P.Aop(x) - p);
    const double delta = delta_residual(ynew, y, lam, beta_k);

    stall_hist.push_back(stall_hist.empty()
                             ? cert.yres
                             : std::min(stall_hist.back(), cert.yres));
    const size_t n = stall_hist.size();
    const size_t W = size_t(o.stall_window);
    if (n > W && cert.gres <= cert.yres &&
        stall_hist[n - 1] >= o.tau1 * stall_hist[n - 1 - W]) {
      beta1_cur *= o.tau2;
      ++rep.monitor_fires;
    }
    beta_raw = beta1_cur / std::pow(double(k + 1), o.rho);
    beta = std::min(std::max(beta_raw, o.beta_floor_mult * lam),
                    o.beta1 / std::pow(double(k + 1), o.rho));
    y = ynew;

    if (o.keep_trace)
      rep.trace.push_back(IterRecord{
          k, phi_x, phi_k_x, cert.gres, delta, beta_k, o.T,
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count()});
    if (o.keep_iterates) {
      rep.x_trace.push_back(x);
      rep.y_trace.push_back(y);
    }
  }
  rep.x = std::move(x);
  rep.y = std::move(y);
  rep.iters = rep.converged ? k - 1 : std::min(k, o.max_iters);
  rep.rgs = cert;
  rep.ros = check_ros(P, rep.x, lam);
  rep.beta_final = beta;
  rep.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

}  // namespace rada
