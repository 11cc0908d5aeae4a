#pragma once

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rada/baselines.hpp"
#include "rada/data.hpp"
#include "rada/metrics.hpp"
#include "rada/problem.hpp"
#include "rada/solver.hpp"

namespace rada {

enum class Family { Spca, Fpca, SscSynth, SscCsv };

inline std::string family_name(Family f) {
  switch (f) {
    case Family::Spca: return "spca";
    case Family::Fpca: return "fpca";
    case Family::SscSynth: return "ssc-synth";
    default: return "ssc-csv";
  }
}

/// Declarative description of a benchmark run: one problem family, a list
/// of algorithms, and a number of independent trials.  Negative knobs mean
/// "use the family default".
struct ExperimentSpec {
  Family family = Family::Spca;
  int d = 300, N = 50, r = 5, m = 3;
  int feat_dim = 20;      ///< ambient dimension of the synthetic point cloud
  double mu = 1.0;        ///< sparsity weight (box half-width)
  double kappa = 0.2;     ///< Gaussian affinity bandwidth (csv pipeline)
  std::string dataset;    ///< csv path (csv pipeline)
  bool dedup = true;      ///< drop exact duplicate rows on ingestion
  std::vector<std::string> algos{"rada-rgd"};
  int trials = 1;
  std::uint64_t base_seed = 0;
  double eps = -1.0;
  double beta1 = -1.0;
  int T = -1;
  long max_iters = -1;
  double rho = 1.5, tau1 = 0.999, tau2 = 0.9;
  double gamma = 1.0;
};

/// One CSV row of benchmark output; optional fields render as empty cells.
struct MetricsRow {
  std::string problem, algo;
  std::uint64_t seed = 0;
  std::optional<int> d, N, r, m;
  std::optional<double> mu, kappa;
  long iters = 0;
  double cpu_seconds = 0.0;
  std::optional<double> phi, var, sparsity, nmi_score;
  std::optional<double> rgs_gres, rgs_yres, ros_gres;
  bool converged = false;
};

inline const std::vector<std::string>& known_algos() {
  static const std::vector<std::string> v{"rada-pgd", "rada-rgd", "arpgda",
                                          "dsgm",     "radmm",    "sgs-admm"};
  return v;
}

namespace detail {

inline std::string fmt17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string cell(const std::optional<double>& v) {
  return v ? fmt17(*v) : std::string();
}

inline std::string cell(const std::optional<int>& v) {
  return v ? std::to_string(*v) : std::string();
}

/// Family defaults shared by the CLI and the presets.
struct Defaults {
  double eps;
  double beta1;
  int T_pgd, T_rgd;
  long max_iters;
};

inline Defaults family_defaults(const ExperimentSpec& s) {
  switch (s.family) {
    case Family::Spca:
      return {1e-6, double(s.d) * std::sqrt(double(s.r)), 10, 10, 20000};
    case Family::Fpca:
      return {1e-8, 1e4 * double(s.N) * double(s.N) * std::sqrt(double(s.r)),
              5, 5, 20000};
    case Family::SscSynth:
      return {1e-4, double(s.N) * double(s.N) * std::sqrt(double(s.m)), 1, 3,
              5000};
    default:  // SscCsv; beta1 depends on the loaded N, patched by the caller
      return {1e-3, -1.0, 1, 3, 20000};
  }
}

}  // namespace detail

/// Runs every (trial, algorithm) pair of the spec and returns one metrics
/// row per run, in trial-major order.  Solver failures are caught and
/// reported as rows with converged = false and empty result fields.
inline std::vector<MetricsRow> run_experiment(const ExperimentSpec& spec,
                                              std::ostream* log = nullptr) {
  for (const auto& a : spec.algos) {
    bool ok = false;
    for (const auto& k : known_algos()) ok = ok || (k == a);
    if (!ok) throw std::invalid_argument("unknown algorithm: " + a);
  }
  std::vector<MetricsRow> rows;

  // The csv pipeline loads its dataset once, shared across trials.
  std::shared_ptr<Dataset> ds;
  std::shared_ptr<Matrix> Lcsv;
  if (spec.family == Family::SscCsv) {
    ds = std::make_shared<Dataset>(load_dataset_csv(spec.dataset, spec.dedup));
    Matrix Xs = minmax_scale(ds->X.transpose());  // samples as rows
    Lcsv = std::make_shared<Matrix>(
        normalized_laplacian(affinity_gaussian(Xs, spec.kappa)));
  }

  for (int t = 0; t < spec.trials; ++t) {
    const std::uint64_t data_seed = spec.base_seed + std::uint64_t(t);
    const std::uint64_t init_seed =
        spec.base_seed + 10000 + std::uint64_t(t);

    std::unique_ptr<Problem> P;
    Matrix Adata;  // retained for the variance metric
    switch (spec.family) {
      case Family::Spca:
        Adata = gen_gaussian_points(spec.d, spec.N, data_seed);
        P = std::make_unique<SpcaProblem>(Adata, spec.r, spec.mu);
        break;
      case Family::Fpca:
        Adata = gen_gaussian_points(spec.d, spec.N, data_seed);
        P = std::make_unique<FpcaProblem>(Adata, spec.r);
        break;
      case Family::SscSynth: {
        Matrix L = synthetic_ssc_laplacian(spec.N, spec.feat_dim, data_seed);
        P = std::make_unique<SscProblem>(L, spec.m, spec.mu);
        break;
      }
      case Family::SscCsv:
        P = std::make_unique<SscProblem>(*Lcsv, spec.m, spec.mu);
        break;
    }

    ExperimentSpec eff = spec;
    if (spec.family == Family::SscCsv) eff.N = int(Lcsv->rows());
    const auto dflt = detail::family_defaults(eff);
    const double eps = spec.eps >= 0.0 ? spec.eps : dflt.eps;
    double beta1 = spec.beta1 > 0.0 ? spec.beta1 : dflt.beta1;
    if (beta1 <= 0.0)  // csv default depends on the loaded size
      beta1 = double(eff.N) * double(eff.N) * std::sqrt(double(spec.m));
    const long max_iters = spec.max_iters > 0 ? spec.max_iters : dflt.max_iters;
    const double lam = eps / (2.0 * P->R());

    Matrix x0;
    const bool is_ssc = spec.family == Family::SscSynth ||
                        spec.family == Family::SscCsv;
    if (is_ssc)
      x0 = spectral_init(dynamic_cast<SscProblem&>(*P).laplacian(), spec.m);
    else
      x0 = random_point(P->manifold(), init_seed);
    Matrix y0 = dual_init(P->prox());

    for (const auto& algo : spec.algos) {
      MetricsRow row;
      row.problem = family_name(spec.family);
      row.algo = algo;
      row.seed = data_seed;
      row.d = spec.family == Family::SscSynth ? spec.feat_dim
              : spec.family == Family::SscCsv ? int(ds->X.rows())
                                              : spec.d;
      row.N = eff.N;
      if (!is_ssc) row.r = spec.r;
      if (spec.family == Family::Fpca)
        row.m = P->prox().rows;
      else if (is_ssc)
        row.m = spec.m;
      if (spec.family != Family::Fpca) row.mu = spec.mu;
      if (spec.family == Family::SscCsv) row.kappa = spec.kappa;

      try {
        Matrix xf;
        if (algo == "rada-pgd" || algo == "rada-rgd" || algo == "sgs-admm") {
          RadaOptions o;
          o.eps = eps;
          o.beta1 = beta1;
          o.rho = spec.rho;
          o.tau1 = spec.tau1;
          o.tau2 = spec.tau2;
          o.gamma = spec.gamma;
          o.max_iters = max_iters;
          o.inner = algo == "rada-pgd" ? InnerKind::PGD : InnerKind::RGD;
          o.pgd_step = is_ssc ? PgdStepRule::Smoothing : PgdStepRule::Lipschitz;
          o.T = spec.T > 0 ? spec.T
                           : (o.inner == InnerKind::PGD ? dflt.T_pgd
                                                        : dflt.T_rgd);
          o.keep_trace = false;
          RunReport rep = algo == "sgs-admm"
                              ? run_sgs_admm(*P, x0, y0, o)
                              : run_rada(*P, x0, y0, o);
          row.iters = rep.iters;
          row.cpu_seconds = rep.seconds;
          row.converged = rep.converged;
          row.rgs_gres = rep.rgs.gres;
          row.rgs_yres = rep.rgs.yres;
          row.ros_gres = rep.ros.gres;
          xf = rep.x;
        } else if (algo == "arpgda") {
          ArpgdaOptions o;
          o.eps = eps;
          o.max_iters = max_iters;
          if (spec.family == Family::Fpca) {
            o.beta_coeff = 1e3 * double(eff.N) * double(eff.N) *
                           std::sqrt(double(spec.r));
          } else if (is_ssc) {
            o.beta_coeff =
                double(eff.N) * double(eff.N) * std::sqrt(double(spec.m));
            o.window = 50;
          } else {
            o.beta_coeff = double(spec.d) * std::sqrt(double(spec.r));
          }
          BaselineReport rep = run_arpgda(*P, x0, y0, o);
          row.iters = rep.iters;
          row.cpu_seconds = rep.seconds;
          row.converged = rep.window_stopped;
          xf = rep.x;
          RgsCert c = check_rgs(*P, xf, rep.y, spec.gamma);
          row.rgs_gres = c.gres;
          row.rgs_yres = c.yres;
          row.ros_gres = check_ros(*P, xf, lam).gres;
        } else if (algo == "dsgm") {
          DsgmOptions o;
          o.max_iters = max_iters;
          o.lam_coeff = is_ssc ? 1e-2 : 10.0;
          if (is_ssc) o.window = 50;
          BaselineReport rep = run_dsgm(*P, x0, o);
          row.iters = rep.iters;
          row.cpu_seconds = rep.seconds;
          row.converged = rep.window_stopped;
          xf = rep.x;
          Matrix z = prox_h(P->prox(), P->Aop(xf) / lam);
          RgsCert c = check_rgs(*P, xf, z, spec.gamma);
          row.rgs_gres = c.gres;
          row.rgs_yres = c.yres;
          row.ros_gres = check_ros(*P, xf, lam).gres;
        } else {  // radmm
          RadmmOptions o;
          o.max_iters = max_iters;
          if (is_ssc) {
            o.lam_coeff = 1e-2;
            o.sigma_coeff = 0.1;
            o.sigma_exp = 1.0 / 3.0;
            o.window = 50;
          } else {
            o.lam_coeff = 10.0;
            o.sigma_coeff = 1e-7;
            o.sigma_exp = 1.5;
          }
          Matrix ymult = Matrix::Zero(P->prox().rows, P->prox().cols);
          BaselineReport rep = run_radmm(*P, x0, ymult, o);
          row.iters = rep.iters;
          row.cpu_seconds = rep.seconds;
          row.converged = rep.window_stopped;
          xf = rep.x;
          Matrix z = prox_h(P->prox(), P->Aop(xf) / lam);
          RgsCert c = check_rgs(*P, xf, z, spec.gamma);
          row.rgs_gres = c.gres;
          row.rgs_yres = c.yres;
          row.ros_gres = check_ros(*P, xf, lam).gres;
        }

        row.phi = P->phi(xf);
        if (spec.family == Family::Spca) {
          row.var = normalized_variance(Adata, xf, spec.r);
          row.sparsity = sparsity_percent(xf);
        } else if (is_ssc) {
          row.sparsity = sparsity_percent(xf * xf.transpose());
          if (spec.family == Family::SscCsv) {
            std::vector<int> pred = cluster_from_solution(xf, spec.m, 10, 0);
            row.nmi_score = nmi(ds->labels, pred);
          }
        }
      } catch (const std::exception& e) {
        row.converged = false;
        if (log)
          *log << "run failed (" << row.problem << ", " << algo << ", seed "
               << row.seed << "): " << e.what() << "\n";
      }
      rows.push_back(std::move(row));
      if (log) {
        const MetricsRow& rb = rows.back();
        *log << rb.problem << " " << rb.algo << " seed " << rb.seed
             << ": iters " << rb.iters << " phi "
             << (rb.phi ? detail::fmt17(*rb.phi) : "-")
             << (rb.converged ? "" : " (not converged)") << "\n";
      }
    }
  }
  return rows;
}

inline const std::string& csv_header() {
  static const std::string h =
      "problem,algo,seed,d,N,r,m,mu,kappa,iters,cpu_seconds,phi,var,sparsity,"
      "nmi,rgs_gres,rgs_yres,ros_gres,converged";
  return h;
}

inline void write_csv(const std::vector<MetricsRow>& rows, std::ostream& os) {
  os << csv_header() << "\n";
  for (const auto& r : rows) {
    os << r.problem << ',' << r.algo << ',' << r.seed << ','
       << detail::cell(r.d) << ',' << detail::cell(r.N) << ','
       << detail::cell(r.r) << ',' << detail::cell(r.m) << ','
       << detail::cell(r.mu) << ',' << detail::cell(r.kappa) << ','
       << r.iters << ',' << detail::fmt17(r.cpu_seconds) << ','
       << detail::cell(r.phi) << ',' << detail::cell(r.var) << ','
       << detail::cell(r.sparsity) << ',' << detail::cell(r.nmi_score) << ','
       << detail::cell(r.rgs_gres) << ',' << detail::cell(r.rgs_yres) << ','
       << detail::cell(r.ros_gres) << ','
       << (r.converged ? "true" : "false") << "\n";
  }
}

inline void write_json(const std::vector<MetricsRow>& rows,
                       std::ostream& os) {
  nlohmann::json arr = nlohmann::json::array();
  auto put = [](nlohmann::json& o, const char* k, const auto& v) {
    if (v)
      o[k] = *v;
    else
      o[k] = nullptr;
  };
  for (const auto& r : rows) {
    nlohmann::json o;
    o["problem"] = r.problem;
    o["algo"] = r.algo;
    o["seed"] = r.seed;
    put(o, "d", r.d);
    put(o, "N", r.N);
    put(o, "r", r.r);
    put(o, "m", r.m);
    put(o, "mu", r.mu);
    put(o, "kappa", r.kappa);
    o["iters"] = r.iters;
    o["cpu_seconds"] = r.cpu_seconds;
    put(o, "phi", r.phi);
    put(o, "var", r.var);
    put(o, "sparsity", r.sparsity);
    put(o, "nmi", r.nmi_score);
    put(o, "rgs_gres", r.rgs_gres);
    put(o, "rgs_yres", r.rgs_yres);
    put(o, "ros_gres", r.ros_gres);
    o["converged"] = r.converged;
    arr.push_back(std::move(o));
  }
  os << arr.dump(2) << "\n";
}

/// Benchmark presets at workstation scale.  Each preset is a list of
/// experiment specs whose rows are concatenated into one table.
inline std::vector<ExperimentSpec> bench_preset(const std::string& name,
                                                const std::string& data_dir) {
  std::vector<ExperimentSpec> out;
  if (name == "table2") {
    ExperimentSpec a;
    a.family = Family::Spca;
    a.d = 300; a.N = 50; a.r = 5; a.mu = 1.0;
    a.algos = {"rada-rgd"};
    a.trials = 10;
    a.base_seed = 100;
    out.push_back(a);
    ExperimentSpec b = a;
    b.d = 1000; b.r = 10; b.mu = 0.5;
    b.trials = 3;
    b.base_seed = 500;
    out.push_back(b);
  } else if (name == "table3") {
    ExperimentSpec a;
    a.family = Family::Fpca;
    a.d = 200; a.N = 20; a.r = 4;
    a.algos = {"rada-rgd", "arpgda", "dsgm", "radmm"};
    a.trials = 20;
    a.base_seed = 500;
    out.push_back(a);
    ExperimentSpec b = a;
    b.d = 1000; b.r = 2;
    b.algos = {"rada-rgd"};
    b.base_seed = 200;
    out.push_back(b);
  } else if (name == "table4") {
    ExperimentSpec a;
    a.family = Family::SscSynth;
    a.N = 200; a.feat_dim = 20; a.m = 3; a.mu = 0.005;
    a.algos = {"rada-pgd", "rada-rgd", "dsgm", "arpgda"};
    a.trials = 10;
    a.base_seed = 400;
    out.push_back(a);
  } else if (name == "table5") {
    ExperimentSpec a;
    a.family = Family::SscCsv;
    a.dataset = data_dir + "/iris.csv";
    a.kappa = 0.2; a.mu = 0.005; a.m = 3;
    a.algos = {"rada-pgd", "rada-rgd"};
    a.trials = 1;
    a.base_seed = 0;
    out.push_back(a);
  } else {
    throw std::invalid_argument("unknown bench preset: " + name);
  }
  return out;
}

}  // namespace rada
