#include "romctl/cli/config.hpp"

#include <fstream>

#include "romctl/common/error.hpp"

namespace romctl::cli {

namespace {

template <typename T>
T get_or(const nlohmann::json& json, const char* key, T fallback) {
  if (!json.contains(key)) return fallback;
  return json.at(key).get<T>();
}

Eigen::VectorXd vector_from_json(const nlohmann::json& json) {
  const auto values = json.get<std::vector<double>>();
  Eigen::VectorXd v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v[i] = values[i];
  return v;
}

std::vector<double> vector_to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

fem::MeshSpec mesh_from_json(const nlohmann::json& json) {
  fem::MeshSpec spec;
  const std::string kind = json.at("kind").get<std::string>();
  if (kind == "bar") {
    spec.kind = fem::MeshSpec::Kind::bar;
    spec.bar.nx = json.at("nx").get<int>();
    spec.bar.ny = json.at("ny").get<int>();
    if (json.contains("nz")) spec.bar.nz = json.at("nz").get<int>();
    spec.bar.spacing = json.at("spacing").get<double>();
  } else if (kind == "cross") {
    spec.kind = fem::MeshSpec::Kind::cross;
    spec.cross.arm_cells = json.at("arm_cells").get<int>();
    spec.cross.arm_width = json.at("arm_width").get<int>();
    spec.cross.spacing = json.at("spacing").get<double>();
  } else {
    throw ConfigError("unknown mesh kind '" + kind + "' (bar or cross)");
  }
  return spec;
}

nlohmann::json mesh_to_json(const fem::MeshSpec& spec) {
  if (spec.kind == fem::MeshSpec::Kind::bar) {
    nlohmann::json json{{"kind", "bar"},
                        {"nx", spec.bar.nx},
                        {"ny", spec.bar.ny},
                        {"spacing", spec.bar.spacing}};
    if (spec.bar.nz) json["nz"] = *spec.bar.nz;
    return json;
  }
  return nlohmann::json{{"kind", "cross"},
                        {"arm_cells", spec.cross.arm_cells},
                        {"arm_width", spec.cross.arm_width},
                        {"spacing", spec.cross.spacing}};
}

}  // namespace

PipelineConfig config_from_json(const nlohmann::json& json) {
  PipelineConfig config;
  config.mesh = mesh_from_json(json.at("mesh"));
  const int dim = config.dimension();

  const auto& mat = json.at("material");
  config.material.youngs_modulus = mat.at("youngs_modulus").get<double>();
  config.material.poisson_ratio = mat.at("poisson_ratio").get<double>();
  config.material.density = mat.at("density").get<double>();
  config.material.rayleigh_alpha = get_or(mat, "rayleigh_alpha", 0.0);
  config.material.rayleigh_beta = get_or(mat, "rayleigh_beta", 0.0);

  config.num_modes = json.at("num_modes").get<int>();
  config.control_dim = json.at("control_dim").get<int>();

  const auto& env = json.at("environment");
  const std::string mode = env.at("mode").get<std::string>();
  if (mode == "ground") {
    config.environment = sim::make_ground_env(dim);
    if (env.contains("ground")) {
      const auto& ground = env.at("ground");
      if (ground.contains("normal")) {
        config.environment.ground.normal = vector_from_json(ground.at("normal"));
        const double norm = config.environment.ground.normal.norm();
        if (norm > 0.0) config.environment.ground.normal /= norm;
      }
      config.environment.ground.offset = get_or(ground, "offset", 0.0);
      config.environment.ground.friction = get_or(ground, "friction", 0.5);
    }
    if (env.contains("gravity"))
      config.environment.gravity = vector_from_json(env.at("gravity"));
  } else if (mode == "fluid") {
    config.environment = sim::make_fluid_env(dim);
    if (env.contains("fluid")) {
      const auto& fluid = env.at("fluid");
      config.environment.fluid.drag_coeff = get_or(fluid, "drag_coeff", 1.0);
      config.environment.fluid.density = get_or(fluid, "density", 1000.0);
    }
  } else {
    throw ConfigError("unknown environment mode '" + mode + "'");
  }
  config.environment.contact_tol =
      get_or(env, "contact_tol", 1e-3 * config.mesh.spacing());

  const auto& task = json.at("task");
  config.task.direction = vector_from_json(task.at("direction"));
  const double dir_norm = config.task.direction.norm();
  if (!(dir_norm > 0.0)) throw ConfigError("task direction must be nonzero");
  config.task.direction /= dir_norm;
  config.task.w_rot = get_or(task, "w_rot", 0.1);
  config.task.w_perp = get_or(task, "w_perp", 0.1);
  config.task.w_control = get_or(task, "w_control", 1e-4);

  const auto& mpc = json.at("mpc");
  config.mpc.horizon = mpc.at("horizon").get<int>();
  config.mpc.control_points = mpc.at("control_points").get<int>();
  config.mpc.control_dim = config.control_dim;
  config.mpc.dt = mpc.at("dt").get<double>();
  const std::string controller = get_or<std::string>(mpc, "controller", "mppi");
  if (controller == "mppi")
    config.mpc.controller = mpc::ControllerKind::mppi;
  else if (controller == "gauss_newton")
    config.mpc.controller = mpc::ControllerKind::gauss_newton;
  else
    throw ConfigError("unknown controller '" + controller + "'");
  config.mpc.replan_interval = get_or(mpc, "replan_interval", 0);
  if (mpc.contains("mppi")) {
    const auto& mppi = mpc.at("mppi");
    config.mpc.mppi.samples = get_or(mppi, "samples", 0);
    config.mpc.mppi.temperature = get_or(mppi, "temperature", 0.05);
    config.mpc.mppi.noise = get_or(mppi, "noise", 1.0);
    config.mpc.mppi.iterations = get_or(mppi, "iterations", 3);
  }
  if (mpc.contains("gn")) {
    const auto& gn = mpc.at("gn");
    config.mpc.gn.max_iterations = get_or(gn, "max_iterations", 4);
    config.mpc.gn.step = get_or(gn, "step", 1.0);
    config.mpc.gn.levenberg = get_or(gn, "levenberg", 1e-6);
    config.mpc.gn.fd_step = get_or(gn, "fd_step", 1e-4);
  }

  if (json.contains("rbbo")) {
    const auto& rb = json.at("rbbo");
    config.rbbo.iterations = get_or(rb, "iterations", 40);
    config.rbbo.initial_design = get_or(rb, "initial_design", 5);
    config.rbbo.t_max = get_or(rb, "t_max", 300);
    config.rbbo.boca_threshold = get_or(rb, "boca_threshold", 0.5);
    config.rbbo.multi_fidelity = get_or(rb, "multi_fidelity", true);
    config.rbbo.normalize_fidelity = get_or(rb, "normalize_fidelity", true);
    config.rbbo.beta = get_or(rb, "beta", 0.0);
    config.rbbo.hyperopt_interval = get_or(rb, "hyperopt_interval", 5);
    config.rbbo.wall_budget_s = get_or(rb, "wall_budget_s", 0.0);
  }

  config.output_dir = get_or<std::string>(json, "output_dir", "out");
  config.seed = get_or<std::uint64_t>(json, "seed", 0);
  config.threads = get_or(json, "threads", 0);
  config.mpc.threads = config.threads;
  config.rbbo.seed = config.seed;
  return config;
}

nlohmann::json config_to_json(const PipelineConfig& config) {
  nlohmann::json env;
  if (config.environment.mode == sim::EnvMode::ground) {
    env = {{"mode", "ground"},
           {"gravity", vector_to_std(config.environment.gravity)},
           {"ground",
            {{"normal", vector_to_std(config.environment.ground.normal)},
             {"offset", config.environment.ground.offset},
             {"friction", config.environment.ground.friction}}}};
  } else {
    env = {{"mode", "fluid"},
           {"fluid",
            {{"drag_coeff", config.environment.fluid.drag_coeff},
             {"density", config.environment.fluid.density}}}};
  }
  env["contact_tol"] = config.environment.contact_tol;

  return nlohmann::json{
      {"schema_version", 1},
      {"mesh", mesh_to_json(config.mesh)},
      {"material",
       {{"youngs_modulus", config.material.youngs_modulus},
        {"poisson_ratio", config.material.poisson_ratio},
        {"density", config.material.density},
        {"rayleigh_alpha", config.material.rayleigh_alpha},
        {"rayleigh_beta", config.material.rayleigh_beta}}},
      {"num_modes", config.num_modes},
      {"control_dim", config.control_dim},
      {"environment", env},
      {"task",
       {{"direction", vector_to_std(config.task.direction)},
        {"w_rot", config.task.w_rot},
        {"w_perp", config.task.w_perp},
        {"w_control", config.task.w_control}}},
      {"mpc",
       {{"horizon", config.mpc.horizon},
        {"control_points", config.mpc.control_points},
        {"dt", config.mpc.dt},
        {"controller", config.mpc.controller == mpc::ControllerKind::mppi
                           ? "mppi"
                           : "gauss_newton"},
        {"replan_interval", config.mpc.replan_interval},
        {"mppi",
         {{"samples", config.mpc.mppi.samples},
          {"temperature", config.mpc.mppi.temperature},
          {"noise", config.mpc.mppi.noise},
          {"iterations", config.mpc.mppi.iterations}}},
        {"gn",
         {{"max_iterations", config.mpc.gn.max_iterations},
          {"step", config.mpc.gn.step},
          {"levenberg", config.mpc.gn.levenberg},
          {"fd_step", config.mpc.gn.fd_step}}}}},
      {"rbbo",
       {{"iterations", config.rbbo.iterations},
        {"initial_design", config.rbbo.initial_design},
        {"t_max", config.rbbo.t_max},
        {"boca_threshold", config.rbbo.boca_threshold},
        {"multi_fidelity", config.rbbo.multi_fidelity},
        {"normalize_fidelity", config.rbbo.normalize_fidelity},
        {"beta", config.rbbo.beta},
        {"hyperopt_interval", config.rbbo.hyperopt_interval},
        {"wall_budget_s", config.rbbo.wall_budget_s}}},
      {"output_dir", config.output_dir},
      {"seed", config.seed},
      {"threads", config.threads}};
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json json;
  try {
    in >> json;
  } catch (const std::exception& error) {
    throw ConfigError("config " + path + " is not valid JSON: " + error.what());
  }
  PipelineConfig config;
  try {
    config = config_from_json(json);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& error) {
    throw ConfigError("config " + path + ": " + error.what());
  }

  // cross-field validation needs the mesh size
  fem::Mesh mesh;
  try {
    mesh = fem::build_mesh(config.mesh);
    fem::validate_material(config.material);
    config.environment.validate();
    config.task.validate(mesh.dim);
    config.mpc.validate();
    config.rbbo.validate();
  } catch (const std::exception& error) {
    throw ConfigError("config " + path + ": " + error.what());
  }
  const int rigid = mesh.dim * (mesh.dim + 1) / 2;
  if (config.num_modes < rigid + 1 || config.num_modes > mesh.dof())
    throw ConfigError("config " + path + ": num_modes " +
                      std::to_string(config.num_modes) +
                      " out of range for a mesh with " +
                      std::to_string(mesh.dof()) + " dofs");
  if (config.control_dim < 1 || config.control_dim > config.num_modes)
    throw ConfigError("config " + path + ": control_dim must lie in [1, num_modes]");
  return config;
}

}  // namespace romctl::cli
