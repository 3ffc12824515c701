#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "romctl/cli/commands.hpp"
#include "romctl/common/error.hpp"

namespace {

void add_common_flags(CLI::App* cmd, romctl::cli::CommonFlags* flags) {
  cmd->add_option("--config", flags->config_path, "pipeline config JSON")
      ->required();
  cmd->add_option("--seed", [flags](const CLI::results_t& results) {
        flags->seed = std::stoull(results[0]);
        return true;
      }, "override the config seed");
  cmd->add_option("--out", [flags](const CLI::results_t& results) {
        flags->out = results[0];
        return true;
      }, "override the output directory");
  cmd->add_option("--threads", [flags](const CLI::results_t& results) {
        flags->threads = std::stoi(results[0]);
        return true;
      }, "cap concurrent rollouts");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reduced-order control-space synthesis for soft bodies"};
  app.require_subcommand(1);

  romctl::cli::CommonFlags flags;

  CLI::App* build = app.add_subcommand(
      "build-rom", "assemble the model and write the modal basis artifacts");
  add_common_flags(build, &flags);

  CLI::App* run_mpc = app.add_subcommand(
      "run-mpc", "run the receding-horizon controller and export the trajectory");
  add_common_flags(run_mpc, &flags);
  run_mpc->add_option("--bc", flags.bc_source,
                      "control basis: 'identity' or a basis JSON file");

  CLI::App* run_rbbo = app.add_subcommand(
      "run-rbbo", "optimize the control basis over the Grassmannian");
  add_common_flags(run_rbbo, &flags);
  run_rbbo->add_flag("--resume", flags.resume,
                     "continue from the existing dataset file");

  CLI::App* compare = app.add_subcommand(
      "compare", "multi-fidelity vs single-fidelity optimization under one budget");
  add_common_flags(compare, &flags);

  CLI::App* export_cmd =
      app.add_subcommand("export", "write mesh (and mode shape) JSON for plotting");
  add_common_flags(export_cmd, &flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) romctl::cli::cmd_build_rom(flags);
    if (run_mpc->parsed()) romctl::cli::cmd_run_mpc(flags);
    if (run_rbbo->parsed()) romctl::cli::cmd_run_rbbo(flags);
    if (compare->parsed()) romctl::cli::cmd_compare(flags);
    if (export_cmd->parsed()) romctl::cli::cmd_export(flags);
  } catch (const romctl::ConfigError& error) {
    std::cerr << "config error: " << error.what() << "\n";
    return 2;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 3;
  }
  return 0;
}
