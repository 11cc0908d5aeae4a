#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rada/manifold.hpp"
#include "rada/problem.hpp"
#include "rada/prox.hpp"

namespace rada {

/// Raised when an iterative routine cannot make progress (for example a
/// line search that exhausts its backtracking budget).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Inner solvers for the smoothed subproblem.
enum class InnerKind { RGD, PGD };

/// Stepsize rule for the projected-gradient inner solver: a global
/// smoothness bound, or the smoothing width itself (the closed-form
/// projector step available when A(Q) is affine in Q = X X').
enum class PgdStepRule { Lipschitz, Smoothing };

struct RadaOptions {
  double eps = 1e-6;    ///< stationarity target
  double lam = -1.0;    ///< dual regularization; eps / (2R) when negative
  double beta1 = -1.0;  ///< initial smoothing width (required, > 0)
  double rho = 1.5;     ///< decay exponent of the width schedule
  double tau1 = 0.999;  ///< stall threshold of the adaptive schedule
  double tau2 = 0.9;    ///< width multiplier applied on a stall
  int T = 1;            ///< inner steps per outer iteration
  InnerKind inner = InnerKind::RGD;
  PgdStepRule pgd_step = PgdStepRule::Lipschitz;
  double c1 = 1e-4;  ///< Armijo slope fraction
  double eta = 0.1;  ///< backtracking factor
  double zeta_min = 1e-10, zeta_max = 1e2, zeta_init = 1e-3;
  int max_backtracks = 60;
  double gamma = 1.0;  ///< proximal stepsize in the stationarity certificate
  long max_iters = 20000;
  double beta_floor_mult = 3.0;  ///< width floor as a multiple of lam
  int stall_window = 20;         ///< lookback of the stall monitor
  bool keep_trace = true;
  int log_every = 1;           ///< record every log_every-th iteration
  bool keep_iterates = false;  ///< record (x, y) after every outer iteration
};

/// First-order stationarity certificate of the smoothed saddle point:
/// gres is the Riemannian gradient residual at the probe dual variable,
/// yres the proximal residual of the dual ascent step.
struct RgsCert {
  double gres = std::numeric_limits<double>::quiet_NaN();
  double yres = std::numeric_limits<double>::quiet_NaN();
};

/// Certificate of approximate original-problem stationarity built from the
/// scaled projection probe: gres as above, pres the dual perturbation norm.
struct RosCert {
  double gres = std::numeric_limits<double>::quiet_NaN();
  double pres = std::numeric_limits<double>::quiet_NaN();
};

struct IterRecord {
  long k = 0;
  double phi = 0.0;       ///< primal objective at the iterate
  double phi_k = 0.0;     ///< smoothed objective at the iterate
  double grad_norm = 0.0; ///< Riemannian gradient norm of the smoothed objective
  double delta = 0.0;     ///< dual residual of this iteration's ascent step
  double beta = 0.0;      ///< smoothing width in force
  int inner_steps = 0;
  double seconds = 0.0;
};

struct RunReport {
  Matrix x, y;
  bool converged = false;
  long iters = 0;
  double seconds = 0.0;
  double lam = 0.0;
  double beta_final = 0.0;
  RgsCert rgs{};
  RosCert ros{};
  /// Worst signed slack of the accepted line-search steps against the
  /// sufficient-decrease bound with allowance 2 R^2 beta; must stay >= -1e-12.
  double min_armijo_margin = std::numeric_limits<double>::infinity();
  /// Worst per-step decrease of the smoothed objective under the
  /// projected-gradient inner solver; must stay >= -1e-10.
  double min_pgd_decrease = std::numeric_limits<double>::infinity();
  long monitor_fires = 0;
  std::vector<IterRecord> trace;
  std::vector<Matrix> x_trace, y_trace;  ///< filled when keep_iterates is set
};

/// Maximizer of the beta-regularized dual subproblem at x:
///   y_half = prox_h( (A(x) + beta y) / (lam + beta) ).
inline Matrix y_half(const Problem& P, const Matrix& x, const Matrix& y,
                     double lam, double beta) {
  return prox_h(P.prox(), (P.Aop(x) + beta * y) / (lam + beta));
}

/// Smoothed objective
///   Phi_k(x) = f(x) + M_{(lam+beta) h*}(A(x) + beta y) - (beta/2)||y||^2,
/// evaluated both through the Moreau-envelope closed form and through the
/// explicit maximizer y_half.  The two routes must agree to 1e-8 relative
/// accuracy; a larger gap raises an error.  The envelope value is returned.
inline double phi_k_value(const Problem& P, const Matrix& x, const Matrix& y,
                          double lam, double beta) {
  const ProxDesc& h = P.prox();
  const double fx = P.f(x);
  const double t = lam + beta;
  Matrix Ax = P.Aop(x);
  Matrix v = Ax + beta * y;
  const double env =
      fx + moreau_env_conj_value(h, v, t) - 0.5 * beta * y.squaredNorm();
  Matrix yh = prox_h(h, v / t);
  const double direct = fx + Ax.cwiseProduct(yh).sum() -
                        0.5 * lam * yh.squaredNorm() -
                        0.5 * beta * (yh - y).squaredNorm();
  if (!(std::abs(env - direct) <= 1e-8 * (1.0 + std::abs(env))))
    throw std::runtime_error(
        "phi_k_value: envelope and saddle evaluations disagree beyond 1e-8");
  return env;
}

/// Ambient (Euclidean) gradient of the smoothed objective,
///   grad Phi_k(x) = grad f(x) + DA(x)^* [y_half].
inline Matrix phi_k_grad(const Problem& P, const Matrix& x, const Matrix& y,
                         double lam, double beta) {
  return P.fgrad(x) + P.Aadj(x, y_half(P, x, y, lam, beta));
}

/// Stationarity residuals at (x, y_probe): the Riemannian gradient norm with
/// the probe dual variable, and the dual proximal residual with stepsize
/// gamma.
inline RgsCert check_rgs(const Problem& P, const Matrix& x,
                         const Matrix& y_probe, double gamma) {
  RgsCert c;
  c.gres = P.tproj(x, P.fgrad(x) + P.Aadj(x, y_probe)).norm();
  Matrix Ax = P.Aop(x);
  c.yres = (y_probe - prox_h(P.prox(), y_probe + gamma * Ax)).norm() / gamma;
  return c;
}

/// Original-problem certificate from the scaled projection probe
/// z = prox_h(A(x)/lam): gradient residual at z and perturbation norm
/// pres = lam ||z||.
inline RosCert check_ros(const Problem& P, const Matrix& x, double lam) {
  RosCert c;
  Matrix z = prox_h(P.prox(), P.Aop(x) / lam);
  c.gres = P.tproj(x, P.fgrad(x) + P.Aadj(x, z)).norm();
  c.pres = lam * z.norm();
  return c;
}

/// Sup-norm residual of the dual ascent step,
///   delta = ||(lam + beta) y_next - beta y||_inf,
/// which equals the sup-norm primal infeasibility of the equivalent
/// splitting iteration.
inline double delta_residual(const Matrix& y_next, const Matrix& y, double lam,
                             double beta) {
  return ((lam + beta) * y_next - beta * y).cwiseAbs().maxCoeff();
}

/// The same residual computed through the splitting route: the sup-norm
/// primal infeasibility ||A(x) - p||_inf of the augmented-Lagrangian
/// p-update p = prox_{(lam+beta) h*}(A(x) + beta y).  It must match
/// delta_residual at (y_half(x, y), y) to round-off.
inline double delta_residual_primal(const Problem& P, const Matrix& x,
                                    const Matrix& y, double lam, double beta) {
  Matrix Ax = P.Aop(x);
  Matrix p = prox_h_conj(P.prox(), Ax + beta * y, lam + beta);
  return (Ax - p).cwiseAbs().maxCoeff();
}

/// State of the stall-driven width cascade.
struct BetaSchedule {
  double beta1 = 0.0;      ///< initial coefficient (fixed)
  double beta1_cur = 0.0;  ///< current, reduced coefficient
  double delta_prev = std::numeric_limits<double>::infinity();
  double rho = 1.5, tau1 = 0.999, tau2 = 0.9;
};

/// One step of the width cascade: if the supplied residual failed to improve
/// by the factor tau1 over the previous one, the coefficient shrinks by
/// tau2; returns the width beta1_cur / (k+1)^rho for the next iteration.
inline double beta_update(BetaSchedule& s, double delta_next, long k) {
  if (delta_next >= s.tau1 * s.delta_prev) s.beta1_cur *= s.tau2;
  s.delta_prev = delta_next;
  return s.beta1_cur / std::pow(double(k + 1), s.rho);
}

namespace detail {

/// Shared state of the inner Riemannian gradient descent.
struct RgdState {
  double zeta;
  double min_margin = std::numeric_limits<double>::infinity();
};

/// T backtracked Riemannian gradient steps on Phi_k, with an alternating
/// Barzilai-Borwein trial stepsize.  The acceptance test carries a slack of
/// twice the dual-domain radius squared times the (raw) smoothing width,
/// plus a round-off guard; it is capped so accepted steps always satisfy the
/// sufficient-decrease bound with allowance 2 R^2 beta to within 1e-12.
/// Exhausting the backtracking budget is an error.
inline void rgd_steps(const Problem& P, Matrix& x, const Matrix& y, double lam,
                      double beta, double beta_raw, const RadaOptions& o,
                      RgdState& st) {
  const ManifoldDesc& M = P.manifold();
  const double R2 = P.R() * P.R();
  const double emach = std::numeric_limits<double>::epsilon();
  double fx = phi_k_value(P, x, y, lam, beta);
  Matrix g = P.tproj(x, phi_k_grad(P, x, y, lam, beta));
  for (int t = 1; t <= o.T; ++t) {
    const double slack = std::min(2.0 * R2 * beta_raw + 64.0 * emach * (1.0 + std::abs(fx)),
                                  2.0 * R2 * beta + 1e-12);
    const double gn2 = g.squaredNorm();
    double step = st.zeta;
    Matrix xt;
    double ft = 0.0;
    bool accepted = false;
    for (int j = 0; j < o.max_backtracks; ++j) {
      xt = retract(M, x, -step * g);
      ft = phi_k_value(P, xt, y, lam, beta);
      if (ft - fx <= -o.c1 * step * gn2 + slack) {
        accepted = true;
        break;
      }
      step *= o.eta;
    }
    if (!accepted)
      throw SolverError("inner gradient descent: line search failed after " +
                        std::to_string(o.max_backtracks) + " backtracks");
    st.min_margin = std::min(
        st.min_margin, fx - o.c1 * step * gn2 + 2.0 * R2 * beta - ft);
    Matrix s = xt - x;
    Matrix gnew = P.tproj(xt, phi_k_grad(P, xt, y, lam, beta));
    Matrix v = gnew - g;
    const double sv = std::abs(s.cwiseProduct(v).sum());
    double cand;
    if (t % 2 == 1) {
      cand = sv > 0.0 ? s.squaredNorm() / sv
                      : std::numeric_limits<double>::infinity();
    } else {
      const double vv = v.squaredNorm();
      cand = vv > 0.0 ? sv / vv : std::numeric_limits<double>::infinity();
    }
    const double gnn = gnew.norm();
    const double cap =
        gnn > 0.0 ? o.zeta_max / gnn : std::numeric_limits<double>::infinity();
    st.zeta = std::max(std::min(cand, cap), o.zeta_min);
    if (!std::isfinite(st.zeta)) st.zeta = o.zeta_max;
    x = xt;
    fx = ft;
    g = gnew;
  }
}

/// T projected-gradient steps on Phi_k.  Stiefel instances need smoothness
/// constants; Grassmann instances step in projector space and need the
/// projector-form gradient.  The Smoothing step rule is the closed-form
/// projector step with stepsize lam + beta.  Each step's decrease of the
/// smoothed objective is tracked into min_dec (it must stay >= -1e-10).
inline void pgd_steps(const Problem& P, Matrix& x, const Matrix& y, double lam,
                      double beta, const RadaOptions& o, double& min_dec) {
  const ManifoldDesc& M = P.manifold();
  for (int t = 1; t <= o.T; ++t) {
    const double f_before = phi_k_value(P, x, y, lam, beta);
    Matrix yh = y_half(P, x, y, lam, beta);
    if (M.kind == ManifoldKind::Grassmann) {
      if (!P.has_projector_form())
        throw std::invalid_argument(
            "projected-gradient inner solver: unsupported configuration "
            "(Grassmann problem without projector-form gradient)");
      Matrix GQ = P.projector_grad(x, yh);
      double step;
      if (o.pgd_step == PgdStepRule::Smoothing) {
        step = lam + beta;
      } else {
        auto lip = P.lipschitz();
        if (!lip)
          throw std::invalid_argument(
              "projected-gradient inner solver: unsupported configuration "
              "(no smoothness constants)");
        step = 1.0 / (lip->L_f + P.R() * lip->L_A1 +
                      lip->rho_A * lip->L_A0 / (lam + beta));
      }
      x = project_to_manifold(M, x * x.transpose() - step * GQ);
    } else {
      if (o.pgd_step == PgdStepRule::Smoothing)
        throw std::invalid_argument(
            "projected-gradient inner solver: unsupported configuration "
            "(Smoothing step rule needs the projector form)");
      auto lip = P.lipschitz();
      if (!lip)
        throw std::invalid_argument(
            "projected-gradient inner solver: unsupported configuration "
            "(no smoothness constants)");
      const double ell = lip->L_f + P.R() * lip->L_A1 +
                         lip->rho_A * lip->L_A0 / (lam + beta);
      Matrix G = P.fgrad(x) + P.Aadj(x, yh);
      x = project_to_manifold(M, x - G / ell);
    }
    min_dec = std::min(min_dec, f_before - phi_k_value(P, x, y, lam, beta));
  }
}

}  // namespace detail

/// Runs the adaptively smoothed alternating scheme from (x0, y0):
/// each outer iteration certifies stationarity at the current pair, runs T
/// inner steps on the smoothed objective, takes the proximal dual ascent
/// step, and updates the smoothing width.  The width follows
/// beta1_cur / (k+1)^rho, floored at beta_floor_mult * lam and capped by the
/// undecayed schedule; beta1_cur shrinks by tau2 whenever the prefix-minimum
/// of the dual residual has stalled (no tau1-fold improvement across the
/// lookback window) while the dual residual dominates the gradient residual.
inline RunReport run_rada(const Problem& P, Matrix x, Matrix y,
                          const RadaOptions& o) {
  const ManifoldDesc& M = P.manifold();
  const ProxDesc& h = P.prox();
  if (x.rows() != M.n || x.cols() != M.p)
    throw std::invalid_argument("run_rada: bad primal iterate shape");
  if (y.rows() != h.rows || y.cols() != h.cols)
    throw std::invalid_argument("run_rada: bad dual iterate shape");
  if (!(o.beta1 >= 0.0))
    throw std::invalid_argument("run_rada: beta1 must be non-negative");
  const double lam = o.lam < 0.0 ? o.eps / (2.0 * P.R()) : o.lam;
  if (!(lam > 0.0) || !std::isfinite(lam))
    throw std::invalid_argument(
        "run_rada: need finite lam > 0 (set lam explicitly or eps > 0)");

  RunReport rep;
  rep.lam = lam;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  double beta1_cur = o.beta1;
  double beta_raw = o.beta1;
  double beta =
      std::min(std::max(beta_raw, o.beta_floor_mult * lam), o.beta1);
  std::vector<double> stall_hist;
  detail::RgdState rgd{o.zeta_init};
  RgsCert cert;

  long k = 1;
  for (; k <= o.max_iters; ++k) {
    const double beta_k = beta;
    const bool log_this = o.keep_trace && ((k - 1) % o.log_every == 0);
    Matrix yh = y_half(P, x, y, lam, beta);
    cert = check_rgs(P, x, yh, o.gamma);
    double phi_x = 0.0, phi_k_x = 0.0;
    if (log_this) {
      phi_x = P.phi(x);
      phi_k_x = phi_k_value(P, x, y, lam, beta);
    }
    if (std::max(cert.gres, cert.yres) <= o.eps) {
      rep.converged = true;
      break;
    }

    if (o.inner == InnerKind::RGD)
      detail::rgd_steps(P, x, y, lam, beta, beta_raw, o, rgd);
    else
      detail::pgd_steps(P, x, y, lam, beta, o, rep.min_pgd_decrease);

    Matrix ynew = y_half(P, x, y, lam, beta);
    const double delta = delta_residual(ynew, y, lam, beta);

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

    if (log_this)
      rep.trace.push_back(IterRecord{k, phi_x, phi_k_x, cert.gres, delta,
                                     beta_k, o.T, elapsed()});
    if (o.keep_iterates) {
      rep.x_trace.push_back(x);
      rep.y_trace.push_back(y);
    }
  }

  rep.x = std::move(x);
  rep.y = std::move(y);
  // Completed outer iterations: the certifying visit that stops the loop
  // does not count.
  rep.iters = rep.converged ? k - 1 : std::min(k, o.max_iters);
  rep.rgs = cert;
  rep.ros = check_ros(P, rep.x, lam);
  rep.beta_final = beta;
  rep.min_armijo_margin = rgd.min_margin;
  rep.seconds = elapsed();
  return rep;
}

}  // namespace rada
