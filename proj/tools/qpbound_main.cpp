#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "qpbound/cli.hpp"
#include "qpbound/grid_kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

int main(int argc, char** argv) {
  if (const char* env = std::getenv("QPBOUND_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) {
#ifdef _OPENMP
      omp_set_num_threads(n);
#endif
      if (n == 1) qpbound::kernels::set_parallelism(false);
    }
  }

  CLI::App app{"Certified performance bounds for quarter-plane random walks"};
  app.require_subcommand(1);

  qpbound::cli::BoundOptions bound;
  auto* cmd_bound = app.add_subcommand("bound", "Solve one bound problem");
  cmd_bound->add_option("--model", bound.model, "Model JSON file")->required();
  cmd_bound->add_option("--perturbed", bound.perturbed,
                        "Perturbed model file or rule (split|swap|product_form)")
      ->required();
  cmd_bound->add_option("--measure", bound.measure,
                        "Measure alias or JSON file");
  cmd_bound->add_option("--kind", bound.kind, "Problem kind");
  cmd_bound->add_option("--shape", bound.shape,
                        "Function shape (clinear|global_linear|constant)");
  cmd_bound->add_option("--out", bound.certificate_out,
                        "Write the certificate as JSON");

  std::string sweep_spec;
  auto* cmd_sweep = app.add_subcommand("sweep", "Run a parameter sweep to CSV");
  cmd_sweep->add_option("--spec", sweep_spec, "Sweep spec JSON file")->required();

  qpbound::cli::VerifyOptions verify;
  auto* cmd_verify = app.add_subcommand("verify", "Run verification suites");
  cmd_verify->add_option("--suite", verify.suites,
                         "Suites to run (default: all)");
  cmd_verify->add_option("--random", verify.random_count,
                         "Randomized trial count");
  cmd_verify->add_option("--model", verify.model,
                         "Model for --coefficients");
  cmd_verify->add_flag("--coefficients", verify.dump_coefficients,
                       "Dump the recursion coefficient table as JSON");
  cmd_verify
      ->add_option("--inject-defect", verify.inject_defect,
                   "Test hook: corrupt an internal quantity")
      ->group("");  // hidden

  qpbound::cli::OracleOptions oracle;
  auto* cmd_oracle = app.add_subcommand(
      "oracle", "Brute-force steady-state value of a model");
  cmd_oracle->add_option("--model", oracle.model, "Model JSON file")->required();
  cmd_oracle->add_option("--measure", oracle.measure, "Measure alias or file");
  cmd_oracle->add_option("--tol", oracle.tol, "Truncation tolerance");
  cmd_oracle->add_option("--out", oracle.grid_out,
                         "Dump the stationary grid as CSV");
  cmd_oracle->add_option("--grid-m", oracle.grid_m,
                         "Truncation for the grid dump");

  qpbound::cli::ExportOptions exp;
  auto* cmd_export = app.add_subcommand("export-lp", "Write an LP-format file");
  cmd_export->add_option("--model", exp.model, "Model JSON file")->required();
  cmd_export->add_option("--perturbed", exp.perturbed, "Perturbed model or rule")
      ->required();
  cmd_export->add_option("--measure", exp.measure, "Measure alias or file");
  cmd_export->add_option("--kind", exp.kind, "Problem kind");
  cmd_export->add_option("--shape", exp.shape, "Function shape");
  cmd_export->add_option("--out", exp.out, "Output path")->required();

  CLI11_PARSE(app, argc, argv);

  if (cmd_bound->parsed()) return qpbound::cli::cmd_bound(bound);
  if (cmd_sweep->parsed()) return qpbound::cli::cmd_sweep(sweep_spec);
  if (cmd_verify->parsed()) return qpbound::cli::cmd_verify(verify);
  if (cmd_oracle->parsed()) return qpbound::cli::cmd_oracle(oracle);
  if (cmd_export->parsed()) return qpbound::cli::cmd_export_lp(exp);
  return 1;
}
