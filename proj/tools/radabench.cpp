// Command-line benchmark harness: problem-family subcommands running the
// solver/baseline matrix to CSV or JSON, workstation-scale presets, and the
// library invariant self-test.
//
// Exit codes: 0 success, 1 usage error, 2 runtime/solver failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "rada/rada.hpp"

namespace {

/// Binds the shared experiment flags of one family subcommand to a spec.
void add_common_options(CLI::App* sub, rada::ExperimentSpec& spec) {
  sub->fallthrough();  // let --out/--format appear after the subcommand
  sub->add_option("--algo", spec.algos, "algorithms to run (repeatable)")
      ->check(CLI::IsMember(rada::known_algos()));
  sub->add_option("--trials", spec.trials, "independent trials")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed", spec.base_seed, "base seed, advanced per trial");
  sub->add_option("--eps", spec.eps, "stationarity target");
  sub->add_option("--beta1", spec.beta1, "initial smoothing width");
  sub->add_option("--T", spec.T, "inner steps per outer iteration");
  sub->add_option("--max-iters", spec.max_iters, "outer iteration budget");
  sub->add_option("--rho", spec.rho, "width decay exponent");
  sub->add_option("--tau1", spec.tau1, "stall threshold");
  sub->add_option("--tau2", spec.tau2, "width multiplier on a stall");
  sub->add_option("--gamma", spec.gamma, "certificate proximal stepsize");
}

int write_rows(const std::vector<rada::MetricsRow>& rows,
               const std::string& out, const std::string& format) {
  std::ostream* os = &std::cout;
  std::ofstream f;
  if (!out.empty()) {
    f.open(out);
    if (!f) {
      std::cerr << "error: cannot open output file " << out << "\n";
      return 2;
    }
    os = &f;
  }
  if (format == "json")
    rada::write_json(rows, *os);
  else
    rada::write_csv(rows, *os);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Benchmark harness for Riemannian nonconvex-linear minimax solvers"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a key=value file");

  std::string out, format = "csv";
  app.add_option("--out", out, "output file (default: stdout)");
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));

  rada::ExperimentSpec sp_spca;
  sp_spca.family = rada::Family::Spca;
  sp_spca.d = 300;
  sp_spca.N = 50;
  sp_spca.r = 5;
  sp_spca.mu = 1.0;
  auto* c_spca = app.add_subcommand(
      "spca", "sparse principal component analysis benchmark");
  add_common_options(c_spca, sp_spca);
  c_spca->add_option("--d", sp_spca.d, "feature dimension")
      ->check(CLI::PositiveNumber);
  c_spca->add_option("--n,--N", sp_spca.N, "number of samples")
      ->check(CLI::PositiveNumber);
  c_spca->add_option("--r", sp_spca.r, "number of components")
      ->check(CLI::PositiveNumber);
  c_spca->add_option("--mu", sp_spca.mu, "sparsity weight")
      ->check(CLI::PositiveNumber);

  rada::ExperimentSpec sp_fpca;
  sp_fpca.family = rada::Family::Fpca;
  sp_fpca.d = 200;
  sp_fpca.N = 20;
  sp_fpca.r = 4;
  auto* c_fpca = app.add_subcommand(
      "fpca", "fair principal component analysis benchmark");
  add_common_options(c_fpca, sp_fpca);
  c_fpca->add_option("--d", sp_fpca.d, "feature dimension")
      ->check(CLI::PositiveNumber);
  c_fpca->add_option("--n,--N", sp_fpca.N, "number of samples")
      ->check(CLI::PositiveNumber);
  c_fpca->add_option("--r", sp_fpca.r, "subspace dimension")
      ->check(CLI::PositiveNumber);
  c_fpca->add_option("--mu", sp_fpca.mu, "ignored by this family")
      ->group("");

  rada::ExperimentSpec sp_sscs;
  sp_sscs.family = rada::Family::SscSynth;
  sp_sscs.N = 200;
  sp_sscs.feat_dim = 20;
  sp_sscs.m = 3;
  sp_sscs.mu = 0.005;
  auto* c_sscs = app.add_subcommand(
      "ssc-synth", "sparse spectral clustering on synthetic affinities");
  add_common_options(c_sscs, sp_sscs);
  c_sscs->add_option("--n,--N", sp_sscs.N, "number of points")
      ->check(CLI::PositiveNumber);
  c_sscs->add_option("--m", sp_sscs.m, "number of clusters")
      ->check(CLI::PositiveNumber);
  c_sscs->add_option("--mu", sp_sscs.mu, "sparsity weight")
      ->check(CLI::PositiveNumber);
  c_sscs->add_option("--feat-dim", sp_sscs.feat_dim,
                     "ambient dimension of the synthetic points")
      ->check(CLI::PositiveNumber);

  rada::ExperimentSpec sp_sscc;
  sp_sscc.family = rada::Family::SscCsv;
  sp_sscc.m = 3;
  sp_sscc.mu = 0.005;
  sp_sscc.kappa = 0.2;
  auto* c_sscc = app.add_subcommand(
      "ssc-csv", "sparse spectral clustering on a labeled CSV dataset");
  add_common_options(c_sscc, sp_sscc);
  c_sscc->add_option("--dataset", sp_sscc.dataset,
                     "CSV file whose last column is the class label")
      ->required()
      ->check(CLI::ExistingFile);
  c_sscc->add_option("--m", sp_sscc.m, "number of clusters")
      ->check(CLI::PositiveNumber);
  c_sscc->add_option("--mu", sp_sscc.mu, "sparsity weight")
      ->check(CLI::PositiveNumber);
  c_sscc->add_option("--kappa", sp_sscc.kappa, "affinity bandwidth")
      ->check(CLI::PositiveNumber);
  c_sscc->add_flag("--dedup,!--no-dedup", sp_sscc.dedup,
                   "drop exact duplicate rows (default on)");

  std::string preset = "table2", data_dir = "data";
  auto* c_bench =
      app.add_subcommand("bench", "workstation-scale benchmark presets");
  c_bench->fallthrough();
  c_bench->add_option("preset", preset, "preset name")
      ->check(CLI::IsMember({"table2", "table3", "table4", "table5"}));
  c_bench->add_option("--data-dir", data_dir,
                      "directory with bundled datasets");

  auto* c_self =
      app.add_subcommand("selftest", "run the library invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (c_self->parsed()) {
      const int fails = rada::run_selftest(std::cout);
      return fails == 0 ? 0 : 2;
    }
    if (c_bench->parsed()) {
      std::vector<rada::MetricsRow> rows;
      for (const auto& spec : rada::bench_preset(preset, data_dir)) {
        auto part = rada::run_experiment(spec, &std::cerr);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      return write_rows(rows, out, format);
    }
    const rada::ExperimentSpec* spec = nullptr;
    if (c_spca->parsed()) spec = &sp_spca;
    if (c_fpca->parsed()) spec = &sp_fpca;
    if (c_sscs->parsed()) spec = &sp_sscs;
    if (c_sscc->parsed()) spec = &sp_sscc;
    auto rows = rada::run_experiment(*spec, &std::cerr);
    return write_rows(rows, out, format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
