#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"LV-HBA: single-loop Hessian-free solver for bilevel problems "
               "with coupled lower-level constraints"};
  app.require_subcommand(1);

  std::string config_path;
  lvhba::cli::CliOverrides overrides;
  bool quiet = false;
  std::string out_dir;
  long iters = -1;
  long long seed = -1;
  bool svg = false, no_svg = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "run configuration file")
        ->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--iters", iters, "iteration budget override");
    cmd->add_option("--seed", seed, "benchmark seed override");
    cmd->add_flag("--svg", svg, "write convergence.svg");
    cmd->add_flag("--no-svg", no_svg, "suppress convergence.svg");
    cmd->add_flag("--quiet", quiet, "only errors on stdout/stderr");
  };

  auto* run_cmd = app.add_subcommand("run", "execute one solver run");
  add_common(run_cmd);
  auto* check_cmd =
      app.add_subcommand("checkgrad", "validate oracles and the value-function "
                                      "gradient against finite differences");
  add_common(check_cmd);
  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter grid");
  add_common(sweep_cmd);

  CLI11_PARSE(app, argc, argv);

  if (!out_dir.empty()) overrides.out_dir = out_dir;
  if (iters >= 0) overrides.iters = iters;
  if (seed >= 0) overrides.seed = static_cast<std::uint64_t>(seed);
  if (svg) overrides.svg = true;
  if (no_svg) overrides.svg = false;

  if (run_cmd->parsed()) return lvhba::cli::cmd_run(config_path, overrides, quiet);
  if (check_cmd->parsed())
    return lvhba::cli::cmd_checkgrad(config_path, overrides, quiet);
  return lvhba::cli::cmd_sweep(config_path, overrides, quiet);
}
