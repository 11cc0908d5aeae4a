#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rada/baselines.hpp"
#include "rada/data.hpp"
#include "rada/manifold.hpp"
#include "rada/metrics.hpp"
#include "rada/problem.hpp"
#include "rada/prox.hpp"
#include "rada/solver.hpp"

namespace rada {

namespace selftest_detail {

inline Matrix randn(int rows, int cols, std::mt19937_64& gen) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix G(rows, cols);
  for (Eigen::Index j = 0; j < G.cols(); ++j)
    for (Eigen::Index i = 0; i < G.rows(); ++i) G(i, j) = nd(gen);
  return G;
}

/// Collects per-check pass/fail lines; one line per check, greppable.
struct Check {
  std::ostream& os;
  int failures = 0;

  void operator()(const std::string& suite, const std::string& name, bool ok,
                  double worst = std::numeric_limits<double>::quiet_NaN()) {
    os << "selftest " << suite << "/" << name << ": "
       << (ok ? "PASS" : "FAIL");
    if (std::isfinite(worst)) {
      std::ostringstream d;
      d.precision(3);
      d << std::scientific << worst;
      os << " (worst " << d.str() << ")";
    }
    os << "\n";
    if (!ok) ++failures;
  }
};

/// Worst-case audit of a logged run: recomputes, at every logged iteration,
/// the gradient identity through the conjugate-envelope route, the two
/// evaluations of the smoothed objective, the dual-ascent residual through
/// the splitting route, the width-schedule cap, and dual feasibility.
struct TraceAudit {
  double eq_grad = 0.0;    ///< envelope vs saddle gradient routes
  double phi_two = 0.0;    ///< envelope vs saddle value routes (relative)
  double delta_two = 0.0;  ///< ascent vs splitting residual routes
  double cap_excess = 0.0; ///< width above the undecayed schedule
  double y_infeas = 0.0;   ///< distance of dual iterates from dom h
  bool shape_ok = true;
};

inline TraceAudit audit_run(const Problem& P, const Matrix& x0,
                            const Matrix& y0, const RunReport& rep,
                            const RadaOptions& o) {
  TraceAudit a;
  if (rep.trace.size() != rep.x_trace.size() ||
      rep.trace.size() != rep.y_trace.size()) {
    a.shape_ok = false;
    return a;
  }
  const ProxDesc& h = P.prox();
  const double lam = rep.lam;
  for (size_t i = 0; i < rep.trace.size(); ++i) {
    const IterRecord& t = rep.trace[i];
    const Matrix& xk = i == 0 ? x0 : rep.x_trace[i - 1];
    const Matrix& yk = i == 0 ? y0 : rep.y_trace[i - 1];
    const double tt = lam + t.beta;
    Matrix v = P.Aop(xk) + t.beta * yk;
    Matrix yh = prox_h(h, v / tt);
    Matrix g1 = P.tproj(xk, P.fgrad(xk) + P.Aadj(xk, yh));
    Matrix env_grad = (v - prox_h_conj(h, v, tt)) / tt;
    Matrix g2 = P.tproj(xk, P.fgrad(xk) + P.Aadj(xk, env_grad));
    a.eq_grad = std::max(a.eq_grad, (g1 - g2).norm());

    const double fx = P.f(xk);
    const double env =
        fx + moreau_env_conj_value(h, v, tt) - 0.5 * t.beta * yk.squaredNorm();
    const double direct = fx + P.Aop(xk).cwiseProduct(yh).sum() -
                          0.5 * lam * yh.squaredNorm() -
                          0.5 * t.beta * (yh - yk).squaredNorm();
    a.phi_two = std::max(a.phi_two,
                         std::abs(env - direct) / (1.0 + std::abs(env)));

    const double d2 =
        delta_residual_primal(P, rep.x_trace[i], yk, lam, t.beta);
    a.delta_two = std::max(a.delta_two, std::abs(t.delta - d2));

    const double cap = o.beta1 / std::pow(double(t.k), o.rho);
    a.cap_excess = std::max(a.cap_excess, t.beta - cap);
    if (t.beta < 0.0) a.cap_excess = std::max(a.cap_excess, -t.beta);

    a.y_infeas = std::max(
        a.y_infeas,
        (rep.y_trace[i] - prox_h(h, rep.y_trace[i])).cwiseAbs().maxCoeff());
  }
  return a;
}

inline void suite_manifold(Check& ck) {
  const std::string S = "manifold";
  std::mt19937_64 gen(1001);
  const std::vector<ManifoldDesc> manis{{ManifoldKind::Stiefel, 7, 3},
                                        {ManifoldKind::Grassmann, 6, 2}};
  double feas = 0.0, idem = 0.0, adj = 0.0, zero_dev = 0.0;
  bool first_order = true;
  double fo_worst = 0.0;
  for (const auto& M : manis) {
    for (int trial = 0; trial < 50; ++trial) {
      Matrix X = random_point(M, 1000 + trial);
      feas = std::max(feas, (X.transpose() * X - Matrix::Identity(M.p, M.p))
                                .cwiseAbs()
                                .maxCoeff());
      Matrix G = randn(M.n, M.p, gen);
      Matrix PG = tangent_project(M, X, G);
      idem = std::max(idem, (tangent_project(M, X, PG) - PG).norm());
      Matrix G2 = randn(M.n, M.p, gen);
      const double lhs = PG.cwiseProduct(G2).sum();
      const double rhs = G.cwiseProduct(tangent_project(M, X, G2)).sum();
      adj = std::max(adj, std::abs(lhs - rhs));
      Matrix Xr = retract(M, X, 0.1 * PG);
      feas = std::max(feas, (Xr.transpose() * Xr - Matrix::Identity(M.p, M.p))
                                .cwiseAbs()
                                .maxCoeff());
      Matrix X0 = retract(M, X, Matrix::Zero(M.n, M.p));
      zero_dev = std::max(zero_dev, (X0 - X).cwiseAbs().maxCoeff());
    }
    // First-order agreement of the retraction: along a unit tangent ray the
    // residual against the linear model shrinks superlinearly.
    Matrix X = random_point(M, 4242);
    Matrix V = tangent_project(M, X, randn(M.n, M.p, gen));
    V /= V.norm();
    double prev_ratio = std::numeric_limits<double>::infinity();
    for (double t : {1e-3, 1e-4, 1e-5}) {
      const double err = (retract(M, X, t * V) - X - t * V).norm();
      const double ratio = err / t;
      if (!(ratio < prev_ratio)) first_order = false;
      prev_ratio = ratio;
      if (t == 1e-5) fo_worst = ratio;
    }
  }
  ck(S, "point and retraction feasibility <= 1e-12", feas <= 1e-12, feas);
  ck(S, "tangent projection idempotent <= 1e-12", idem <= 1e-12, idem);
  ck(S, "tangent projection self-adjoint <= 1e-12", adj <= 1e-12, adj);
  ck(S, "zero-displacement retraction exact", zero_dev == 0.0, zero_dev);
  ck(S, "retraction first-order consistent", first_order && fo_worst <= 1e-4,
     fo_worst);
}

inline void suite_prox(Check& ck) {
  const std::string S = "prox";
  std::mt19937_64 gen(2002);
  std::uniform_real_distribution<double> tdist(-2.0, 2.0);
  const std::vector<ProxDesc> descs{{ProxFamily::LinfBall, 0.7, 5, 3},
                                    {ProxFamily::Simplex, 0.0, 6, 1}};
  double nonexp = 0.0, moreau = 0.0, envid = 0.0, grad_two = 0.0;
  double feas_box = 0.0, feas_sum = 0.0, feas_neg = 0.0, pme_res = 0.0;
  for (const auto& h : descs) {
    for (int trial = 0; trial < 100; ++trial) {
      Matrix u = 3.0 * randn(h.rows, h.cols, gen);
      Matrix v = 3.0 * randn(h.rows, h.cols, gen);
      const double t = std::pow(10.0, tdist(gen));
      Matrix pu = prox_h(h, u), pv = prox_h(h, v);
      nonexp = std::max(nonexp,
                        (pu - pv).norm() - (u - v).norm() * (1.0 + 1e-12));
      // Moreau decomposition across the two independently coded proximal
      // maps: prox of the scaled conjugate vs the domain projection.
      Matrix lhs = prox_h_conj(h, v, t);
      Matrix rhs = v - t * prox_h(h, v / t);
      moreau = std::max(moreau, (lhs - rhs).cwiseAbs().maxCoeff() /
                                    (1.0 + v.cwiseAbs().maxCoeff()));
      // Envelope identity M_{t h}(v) + M_{(1/t) h*}(v/t) = ||v||^2 / (2t).
      const double e1 = moreau_env_value(h, v, t) +
                        moreau_env_conj_value(h, v / t, 1.0 / t);
      const double e2 = v.squaredNorm() / (2.0 * t);
      envid = std::max(envid, std::abs(e1 - e2) / (1.0 + std::abs(e2)));
      // The two routes to the conjugate-envelope gradient.
      Matrix r1 = (v - prox_h_conj(h, v, t)) / t;
      Matrix r2 = prox_h(h, v / t);
      grad_two = std::max(grad_two, (r1 - r2).cwiseAbs().maxCoeff());
      // Domain feasibility of the projections.
      if (h.family == ProxFamily::LinfBall) {
        feas_box =
            std::max(feas_box, pu.cwiseAbs().maxCoeff() - h.mu);
      } else {
        feas_sum = std::max(feas_sum, std::abs(pu.sum() - 1.0));
        feas_neg = std::max(feas_neg, -pu.minCoeff());
      }
      // Optimality of the smoothed-envelope proximal map.
      const double lam = 0.3, sigma = 1.7;
      Matrix p = prox_of_moreau_env(h, lam, sigma, v);
      Matrix res = (p - prox_h_conj(h, p, lam)) / lam + sigma * (p - v);
      pme_res = std::max(pme_res, res.cwiseAbs().maxCoeff());
    }
  }
  ck(S, "projections nonexpansive", nonexp <= 0.0, nonexp);
  ck(S, "Moreau decomposition <= 1e-10", moreau <= 1e-10, moreau);
  ck(S, "envelope sum identity <= 1e-10", envid <= 1e-10, envid);
  ck(S, "envelope gradient two routes <= 1e-12", grad_two <= 1e-12, grad_two);
  ck(S, "box projection inside the box", feas_box <= 1e-14, feas_box);
  ck(S, "simplex projection sums to one", feas_sum <= 1e-12, feas_sum);
  ck(S, "simplex projection nonnegative", feas_neg <= 1e-14, feas_neg);
  ck(S, "smoothed-envelope prox optimality <= 1e-9", pme_res <= 1e-9,
     pme_res);
  Matrix z = Matrix::Zero(4, 2);
  ProxDesc box{ProxFamily::LinfBall, 0.7, 4, 2};
  ProxDesc simp{ProxFamily::Simplex, 0.0, 5, 1};
  const bool di_box = dual_init(box) == z;
  const bool di_simp =
      (dual_init(simp).array() == 0.2).all();
  ck(S, "dual initial points exact", di_box && di_simp);
}

inline void suite_problems(Check& ck) {
  const std::string S = "problems";
  std::mt19937_64 gen(3003);
  SpcaProblem spca(gen_gaussian_points(12, 8, 31), 3, 0.6);
  FpcaProblem fpca(gen_gaussian_points(10, 6, 32), 2);
  SscProblem ssc(synthetic_ssc_laplacian(8, 5, 33), 2, 0.3);
  const std::vector<const Problem*> probs{&spca, &fpca, &ssc};

  double fd_worst = 0.0, adj_worst = 0.0, phi_dev = 0.0;
  const double lam = 0.05;
  for (const Problem* Pp : probs) {
    const Problem& P = *Pp;
    const ManifoldDesc& M = P.manifold();
    const ProxDesc& h = P.prox();
    for (int trial = 0; trial < 20; ++trial) {
      Matrix x = random_point(M, 600 + trial);
      Matrix y = prox_h(h, randn(h.rows, h.cols, gen));
      const double beta = trial == 0 ? 0.0 : std::pow(10.0, -3.0 + trial % 5);
      Matrix g = P.fgrad(x) + P.Aadj(x, y_half(P, x, y, lam, beta));
      Matrix gfd(M.n, M.p);
      const double e = 1e-6;
      for (int jj = 0; jj < M.p; ++jj)
        for (int ii = 0; ii < M.n; ++ii) {
          Matrix xp = x, xm = x;
          xp(ii, jj) += e;
          xm(ii, jj) -= e;
          gfd(ii, jj) = (phi_k_value(P, xp, y, lam, beta) -
                         phi_k_value(P, xm, y, lam, beta)) /
                        (2.0 * e);
        }
      fd_worst = std::max(fd_worst,
                          (gfd - g).norm() / std::max(1.0, g.norm()));
      // Adjoint consistency of the coupling map differential.
      Matrix U = randn(M.n, M.p, gen);
      Matrix Y = randn(h.rows, h.cols, gen);
      const double lhs = P.Aadj(x, Y).cwiseProduct(U).sum();
      const double rhs = (P.Aop(x + e * U) - P.Aop(x - e * U))
                             .cwiseProduct(Y)
                             .sum() /
                         (2.0 * e);
      adj_worst = std::max(adj_worst,
                           std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
      // The primal objective agrees with its defining decomposition.
      const double ph = P.phi(x);
      phi_dev = std::max(phi_dev,
                         std::abs(ph - (P.f(x) + conj_value(h, P.Aop(x)))) /
                             (1.0 + std::abs(ph)));
    }
  }
  ck(S, "finite-difference gradient <= 1e-5", fd_worst <= 1e-5, fd_worst);
  ck(S, "coupling-map adjoint <= 1e-5", adj_worst <= 1e-5, adj_worst);
  ck(S, "objective decomposition <= 1e-12", phi_dev <= 1e-12, phi_dev);

  // The linear coupling map is exactly additive and state-independent.
  {
    const ManifoldDesc& M = spca.manifold();
    Matrix x1 = random_point(M, 71), x2 = random_point(M, 72);
    Matrix Y = randn(spca.prox().rows, spca.prox().cols, gen);
    const bool lin =
        spca.Aop(x1 + x2) == spca.Aop(x1) + spca.Aop(x2) &&
        spca.Aadj(x1, Y) == spca.Aadj(x2, Y);
    ck(S, "linear coupling exact", lin);
  }
  // The quadratic coupling maps have an exactly quadratic expansion: the
  // linearization error scales by 100 when the step shrinks by 10.
  double ratio_dev = 0.0;
  for (const Problem* Pp : {(const Problem*)&fpca, (const Problem*)&ssc}) {
    const Problem& P = *Pp;
    const ManifoldDesc& M = P.manifold();
    const ProxDesc& h = P.prox();
    Matrix x = random_point(M, 88);
    Matrix u = randn(M.n, M.p, gen);
    Matrix Ax = P.Aop(x);
    // Differential through the adjoint, probed on a dual basis.
    Matrix Ju = Matrix::Zero(h.rows, h.cols);
    for (int jj = 0; jj < h.cols; ++jj)
      for (int ii = 0; ii < h.rows; ++ii) {
        Matrix E = Matrix::Zero(h.rows, h.cols);
        E(ii, jj) = 1.0;
        Ju(ii, jj) = P.Aadj(x, E).cwiseProduct(u).sum();
      }
    auto err = [&](double e) {
      return (P.Aop(x + e * u) - Ax - e * Ju).norm();
    };
    const double r = err(1e-3) / err(1e-4);
    ratio_dev = std::max(ratio_dev, std::abs(r - 100.0));
  }
  ck(S, "quadratic coupling expansion", ratio_dev <= 15.0, ratio_dev);
}

inline void suite_solver(Check& ck) {
  const std::string S = "solver";
  double eq_grad = 0.0, phi_two = 0.0, delta_two = 0.0, cap_excess = 0.0;
  double y_infeas = 0.0;
  bool shapes = true;

  SpcaProblem spca(gen_gaussian_points(12, 20, 21), 3, 0.8);
  RadaOptions so;
  so.eps = 1e-6;
  so.beta1 = 12.0 * std::sqrt(3.0);
  so.T = 5;
  so.max_iters = 150;
  so.keep_iterates = true;
  Matrix sx0 = random_point(spca.manifold(), 121);
  Matrix sy0 = dual_init(spca.prox());
  RunReport srep = run_rada(spca, sx0, sy0, so);
  {
    TraceAudit a = audit_run(spca, sx0, sy0, srep, so);
    shapes = shapes && a.shape_ok;
    eq_grad = std::max(eq_grad, a.eq_grad);
    phi_two = std::max(phi_two, a.phi_two);
    delta_two = std::max(delta_two, a.delta_two);
    cap_excess = std::max(cap_excess, a.cap_excess);
    y_infeas = std::max(y_infeas, a.y_infeas);
  }

  FpcaProblem fpca(gen_gaussian_points(10, 30, 22), 2);
  RadaOptions fo;
  fo.eps = 1e-8;
  fo.beta1 = 1e4 * 900.0 * std::sqrt(2.0);
  fo.T = 5;
  fo.max_iters = 80;
  fo.keep_iterates = true;
  Matrix fx0 = random_point(fpca.manifold(), 122);
  Matrix fy0 = dual_init(fpca.prox());
  RunReport frep = run_rada(fpca, fx0, fy0, fo);
  {
    TraceAudit a = audit_run(fpca, fx0, fy0, frep, fo);
    shapes = shapes && a.shape_ok;
    eq_grad = std::max(eq_grad, a.eq_grad);
    phi_two = std::max(phi_two, a.phi_two);
    delta_two = std::max(delta_two, a.delta_two);
    cap_excess = std::max(cap_excess, a.cap_excess);
    y_infeas = std::max(y_infeas, a.y_infeas);
  }

  SscProblem ssc(synthetic_ssc_laplacian(30, 8, 23), 3, 0.02);
  Matrix cx0 = spectral_init(ssc.laplacian(), 3);
  Matrix cy0 = dual_init(ssc.prox());
  RadaOptions co;
  co.eps = 1e-4;
  co.beta1 = 900.0 * std::sqrt(3.0);
  co.max_iters = 100;
  co.keep_iterates = true;
  double min_pgd = std::numeric_limits<double>::infinity();
  for (PgdStepRule rule : {PgdStepRule::Smoothing, PgdStepRule::Lipschitz}) {
    RadaOptions oo = co;
    oo.inner = InnerKind::PGD;
    oo.pgd_step = rule;
    oo.T = 1;
    RunReport rep = run_rada(ssc, cx0, cy0, oo);
    min_pgd = std::min(min_pgd, rep.min_pgd_decrease);
    TraceAudit a = audit_run(ssc, cx0, cy0, rep, oo);
    shapes = shapes && a.shape_ok;
    eq_grad = std::max(eq_grad, a.eq_grad);
    phi_two = std::max(phi_two, a.phi_two);
    delta_two = std::max(delta_two, a.delta_two);
    cap_excess = std::max(cap_excess, a.cap_excess);
    y_infeas = std::max(y_infeas, a.y_infeas);
  }
  RadaOptions go = co;
  go.T = 3;
  go.max_iters = 50;
  RunReport grep = run_rada(ssc, cx0, cy0, go);
  {
    TraceAudit a = audit_run(ssc, cx0, cy0, grep, go);
    shapes = shapes && a.shape_ok;
    eq_grad = std::max(eq_grad, a.eq_grad);
    phi_two = std::max(phi_two, a.phi_two);
    delta_two = std::max(delta_two, a.delta_two);
    cap_excess = std::max(cap_excess, a.cap_excess);
    y_infeas = std::max(y_infeas, a.y_infeas);
  }

  const double min_margin =
      std::min(srep.min_armijo_margin,
               std::min(frep.min_armijo_margin, grep.min_armijo_margin));

  ck(S, "trace bookkeeping aligned", shapes);
  ck(S, "gradient routes agree <= 1e-12", eq_grad <= 1e-12, eq_grad);
  ck(S, "smoothed objective routes agree <= 1e-10", phi_two <= 1e-10,
     phi_two);
  ck(S, "ascent residual routes agree <= 1e-10", delta_two <= 1e-10,
     delta_two);
  ck(S, "width cap respected", cap_excess <= 1e-12, cap_excess);
  ck(S, "dual iterates feasible <= 1e-12", y_infeas <= 1e-12, y_infeas);
  ck(S, "line-search margin >= -1e-12", min_margin >= -1e-12, min_margin);
  ck(S, "projected-gradient monotone >= -1e-10", min_pgd >= -1e-10, min_pgd);

  // Bitwise determinism of a repeated run.
  RunReport srep2 = run_rada(spca, sx0, sy0, so);
  bool det = srep.iters == srep2.iters && srep.x == srep2.x &&
             srep.y == srep2.y &&
             srep.x_trace.size() == srep2.x_trace.size();
  if (det)
    for (size_t i = 0; i < srep.x_trace.size(); ++i)
      det = det && srep.x_trace[i] == srep2.x_trace[i] &&
            srep.y_trace[i] == srep2.y_trace[i];
  ck(S, "repeated run bitwise identical", det);
}

inline void suite_baselines(Check& ck) {
  const std::string S = "baselines";
  FpcaProblem fpca(gen_gaussian_points(10, 30, 22), 2);
  Matrix fx0 = random_point(fpca.manifold(), 122);
  Matrix fy0 = dual_init(fpca.prox());
  ArpgdaOptions ao;
  ao.eps = 1e-8;
  ao.beta_coeff = 1e3 * 900.0 * std::sqrt(2.0);
  ao.max_iters = 60;
  BaselineReport arep = run_arpgda(fpca, fx0, fy0, ao);
  ck(S, "ascent gradient identity <= 1e-12", arep.max_identity_dev <= 1e-12,
     arep.max_identity_dev);
  ck(S, "ascent duals feasible <= 1e-12", arep.max_y_infeas <= 1e-12,
     arep.max_y_infeas);

  SscProblem ssc(synthetic_ssc_laplacian(30, 8, 23), 3, 0.02);
  Matrix cx0 = spectral_init(ssc.laplacian(), 3);
  double pres = 0.0;
  {
    RadmmOptions ro;
    ro.lam_coeff = 1e-2;
    ro.lam_exp = 1.0 / 3.0;
    ro.sigma_coeff = 0.1;
    ro.sigma_exp = 1.0 / 3.0;
    ro.max_iters = 60;
    BaselineReport rr = run_radmm(ssc, cx0,
                                  Matrix::Zero(ssc.prox().rows,
                                               ssc.prox().cols),
                                  ro);
    pres = std::max(pres, rr.max_p_residual);
  }
  {
    RadmmOptions ro;
    ro.lam_coeff = 10.0;
    ro.lam_exp = 1.0 / 3.0;
    ro.sigma_coeff = 1e-7;
    ro.sigma_exp = 1.5;
    ro.max_iters = 60;
    BaselineReport rr = run_radmm(fpca, fx0,
                                  Matrix::Zero(fpca.prox().rows,
                                               fpca.prox().cols),
                                  ro);
    pres = std::max(pres, rr.max_p_residual);
  }
  ck(S, "splitting step optimality <= 1e-9", pres <= 1e-9, pres);

  // The symmetric Gauss-Seidel splitting scheme reproduces the adaptively
  // smoothed scheme's iterates on a shared schedule.
  SpcaProblem spca(gen_gaussian_points(20, 10, 7), 3, 1.0);
  Matrix ex0 = random_point(spca.manifold(), 77);
  Matrix ey0 = dual_init(spca.prox());
  RadaOptions eo;
  eo.eps = 0.0;
  eo.lam = 1e-6 / (2.0 * spca.R());
  eo.beta1 = 20.0 * std::sqrt(3.0);
  eo.T = 1;
  eo.max_iters = 30;
  eo.keep_iterates = true;
  RunReport r1 = run_rada(spca, ex0, ey0, eo);
  RunReport r2 = run_sgs_admm(spca, ex0, ey0, eo);
  double dev = std::numeric_limits<double>::infinity();
  if (r1.x_trace.size() == r2.x_trace.size() && !r1.x_trace.empty()) {
    dev = 0.0;
    for (size_t i = 0; i < r1.x_trace.size(); ++i) {
      dev = std::max(dev,
                     (r1.x_trace[i] - r2.x_trace[i]).cwiseAbs().maxCoeff());
      dev = std::max(dev,
                     (r1.y_trace[i] - r2.y_trace[i]).cwiseAbs().maxCoeff());
    }
  }
  ck(S, "splitting scheme matches <= 1e-8", dev <= 1e-8, dev);
}

inline void suite_metrics(Check& ck) {
  const std::string S = "metrics";
  std::mt19937_64 gen(5005);
  SpcaProblem spca(gen_gaussian_points(12, 20, 41), 3, 0.8);
  double var_lo = 0.0, var_hi = 0.0, sp_bad = 0.0, nmi_bad = 0.0;
  for (int t = 0; t < 10; ++t) {
    Matrix X = random_point(spca.manifold(), 900 + t);
    const double v = normalized_variance(spca.data(), X, 3);
    var_lo = std::min(var_lo, v);
    var_hi = std::max(var_hi, v - 1.0);
    const double sp = sparsity_percent(X);
    sp_bad = std::max(sp_bad, std::max(-sp, sp - 100.0));
  }
  std::uniform_int_distribution<int> lab(0, 2);
  for (int t = 0; t < 20; ++t) {
    std::vector<int> a(24), b(24);
    for (auto& z : a) z = lab(gen);
    for (auto& z : b) z = lab(gen);
    const double s = nmi(a, b);
    nmi_bad = std::max(nmi_bad, std::max(-s, s - (1.0 + 1e-12)));
  }
  const bool hand = std::abs(nmi({0, 0, 1, 1}, {0, 1, 0, 1})) <= 1e-12 &&
                    std::abs(nmi({0, 0, 1, 1}, {1, 1, 0, 0}) - 1.0) <= 1e-12;
  ck(S, "variance ratio in [0, 1]", var_lo >= -1e-12 && var_hi <= 1e-12,
     std::max(-var_lo, var_hi));
  ck(S, "sparsity in [0, 100]", sp_bad <= 0.0, sp_bad);
  ck(S, "mutual information score in [0, 1]", nmi_bad <= 0.0, nmi_bad);
  ck(S, "mutual information hand values", hand);
  Matrix pts = randn(30, 3, gen);
  std::vector<int> l1 = kmeans(pts, 3, 5, 17);
  std::vector<int> l2 = kmeans(pts, 3, 5, 17);
  ck(S, "clustering deterministic", l1 == l2);
}

}  // namespace selftest_detail

/// Runs every invariant suite, printing one PASS/FAIL line per check.
/// Returns the number of failed checks (0 means a clean bill).
inline int run_selftest(std::ostream& os) {
  selftest_detail::Check ck{os};
  selftest_detail::suite_manifold(ck);
  selftest_detail::suite_prox(ck);
  selftest_detail::suite_problems(ck);
  selftest_detail::suite_solver(ck);
  selftest_detail::suite_baselines(ck);
  selftest_detail::suite_metrics(ck);
  os << "selftest: " << (ck.failures == 0 ? "all checks passed"
                                          : std::to_string(ck.failures) +
                                                " check(s) failed")
     << "\n";
  return ck.failures;
}

}  // namespace rada
