#pragma once

#include <cstdint>
#include <string>

#include "romctl/fem/material.hpp"
#include "romctl/fem/mesh.hpp"
#include "romctl/mpc/config.hpp"
#include "romctl/rbbo/rbbo.hpp"
#include "romctl/sim/environment.hpp"

#include "json.hpp"

namespace romctl::cli {

// Everything a run needs, loaded from one JSON file so a run is reproducible
// from a single artifact. Flags only override seed, output dir, resume and
// thread count.
struct PipelineConfig {
  fem::MeshSpec mesh;
  fem::Material material;
  int num_modes = 10;   // M
  int control_dim = 2;  // C
  sim::Environment environment;  // built for the mesh dimension
  sim::Task task;
  mpc::MPCConfig mpc;
  rbbo::RbboConfig rbbo;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  int threads = 0;

  int dimension() const { return mesh.kind == fem::MeshSpec::Kind::bar &&
                                 mesh.bar.nz ? 3 : 2; }
};

PipelineConfig config_from_json(const nlohmann::json& json);
nlohmann::json config_to_json(const PipelineConfig& config);

// Parses and validates; throws ConfigError with an actionable message.
PipelineConfig load_config(const std::string& path);

}  // namespace romctl::cli
