#pragma once

#include <optional>
#include <string>

#include "romctl/cli/config.hpp"
#include "romctl/fem/reduced.hpp"

namespace romctl::cli {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  bool resume = false;
  std::string bc_source = "identity";  // run-mpc: "identity" or a file path
};

// Subcommand bodies; exceptions propagate to main, which maps ConfigError
// to exit code 2 and everything else to 3.
void cmd_build_rom(const CommonFlags& flags);
void cmd_run_mpc(const CommonFlags& flags);
void cmd_run_rbbo(const CommonFlags& flags);
void cmd_compare(const CommonFlags& flags);
void cmd_export(const CommonFlags& flags);

// Shared helpers, exposed for tests.
PipelineConfig load_with_overrides(const CommonFlags& flags);
fem::ReducedModel load_reduced_model(const PipelineConfig& config);
void write_rom_artifacts(const PipelineConfig& config);

}  // namespace romctl::cli
