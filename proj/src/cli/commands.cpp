#include "romctl/cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include "romctl/bo/grassmann.hpp"
#include "romctl/common/error.hpp"
#include "romctl/fem/modal.hpp"
#include "romctl/mpc/runner.hpp"
#include "romctl/rbbo/rbbo.hpp"
#include "romctl/sim/stepper.hpp"

namespace romctl::cli {

namespace fs = std::filesystem;

namespace {

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_json_file(const std::string& path, const nlohmann::json& json) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << json.dump(2) << "\n";
  if (!out) throw IoError("failed writing " + path);
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path + " (run build-rom first?)");
  nlohmann::json json;
  try {
    in >> json;
  } catch (const std::exception& error) {
    throw IoError(path + " is not valid JSON: " + error.what());
  }
  return json;
}

std::vector<double> flatten_row_major(const Eigen::MatrixXd& matrix) {
  std::vector<double> flat;
  flat.reserve(matrix.size());
  for (int i = 0; i < matrix.rows(); ++i)
    for (int j = 0; j < matrix.cols(); ++j) flat.push_back(matrix(i, j));
  return flat;
}

Eigen::MatrixXd unflatten_row_major(const std::vector<double>& flat, int rows,
                                    int cols) {
  if (static_cast<int>(flat.size()) != rows * cols)
    throw ValidationError("matrix payload has wrong length");
  Eigen::MatrixXd matrix(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) matrix(i, j) = flat[i * cols + j];
  return matrix;
}

const char* mode_kind_name(fem::ModeKind kind) {
  switch (kind) {
    case fem::ModeKind::rigid_translation: return "rigid_translation";
    case fem::ModeKind::rigid_rotation: return "rigid_rotation";
    default: return "elastic";
  }
}

fem::ModeKind mode_kind_from_name(const std::string& name) {
  if (name == "rigid_translation") return fem::ModeKind::rigid_translation;
  if (name == "rigid_rotation") return fem::ModeKind::rigid_rotation;
  if (name == "elastic") return fem::ModeKind::elastic;
  throw ValidationError("unknown mode kind '" + name + "'");
}

nlohmann::json mesh_geometry_json(const fem::Mesh& mesh) {
  nlohmann::json nodes = nlohmann::json::array();
  for (int i = 0; i < mesh.node_count(); ++i) {
    nlohmann::json node = nlohmann::json::array();
    for (int a = 0; a < mesh.dim; ++a) node.push_back(mesh.nodes(i, a));
    nodes.push_back(node);
  }
  nlohmann::json elements = nlohmann::json::array();
  for (int e = 0; e < mesh.element_count(); ++e) {
    nlohmann::json element = nlohmann::json::array();
    for (int v = 0; v <= mesh.dim; ++v) element.push_back(mesh.elements(e, v));
    elements.push_back(element);
  }
  return nlohmann::json{{"schema_version", 1},
                        {"dimension", mesh.dim},
                        {"nodes", nodes},
                        {"elements", elements}};
}

void write_convergence_csv(const std::string& path,
                           const std::vector<rbbo::ProgressPoint>& series) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << "index,wall_time_s,fidelity,reward,best_at_tmax\n";
  for (const rbbo::ProgressPoint& point : series)
    out << point.index << "," << format_double(point.wall_time_s) << ","
        << point.fidelity << "," << format_double(point.reward) << ","
        << format_double(point.best_at_tmax) << "\n";
  if (!out) throw IoError("failed writing " + path);
}

nlohmann::json series_json(const std::vector<rbbo::ProgressPoint>& series) {
  nlohmann::json out = nlohmann::json::array();
  for (const rbbo::ProgressPoint& point : series)
    out.push_back({{"index", point.index},
                   {"wall_time_s", point.wall_time_s},
                   {"fidelity", point.fidelity},
                   {"reward", point.reward},
                   {"best_at_tmax", point.best_at_tmax}});
  return out;
}

}  // namespace

PipelineConfig load_with_overrides(const CommonFlags& flags) {
  PipelineConfig config = load_config(flags.config_path);
  if (flags.seed) {
    config.seed = *flags.seed;
    config.rbbo.seed = *flags.seed;
  }
  if (flags.out) config.output_dir = *flags.out;
  if (flags.threads) {
    config.threads = *flags.threads;
    config.mpc.threads = *flags.threads;
  }
  fs::create_directories(config.output_dir);
  return config;
}

void write_rom_artifacts(const PipelineConfig& config) {
  const fem::Mesh mesh = fem::build_mesh(config.mesh);
  const fem::FullModel model = fem::assemble(mesh, config.material);
  const fem::BasisMatrix basis = fem::modal_basis(model, config.num_modes);

  const fs::path out(config.output_dir);
  write_json_file(out / "mesh.json", mesh_geometry_json(mesh));

  std::vector<std::string> kinds;
  for (const fem::ModeKind kind : basis.kinds)
    kinds.emplace_back(mode_kind_name(kind));
  write_json_file(
      out / "basis.json",
      nlohmann::json{{"schema_version", 1},
                     {"m", basis.size()},
                     {"dof", mesh.dof()},
                     {"basis", flatten_row_major(basis.modes)},
                     {"eigenvalues", std::vector<double>(
                                         basis.eigenvalues.data(),
                                         basis.eigenvalues.data() + basis.size())},
                     {"modes", kinds}});
  write_json_file(
      out / "eigenvalues.json",
      nlohmann::json{{"schema_version", 1},
                     {"eigenvalues", std::vector<double>(
                                         basis.eigenvalues.data(),
                                         basis.eigenvalues.data() + basis.size())}});
}

fem::ReducedModel load_reduced_model(const PipelineConfig& config) {
  const fs::path out(config.output_dir);
  const nlohmann::json json = read_json_file(out / "basis.json");

  const fem::Mesh mesh = fem::build_mesh(config.mesh);
  const fem::FullModel model = fem::assemble(mesh, config.material);

  fem::BasisMatrix basis;
  const int m = json.at("m").get<int>();
  const int dof = json.at("dof").get<int>();
  if (dof != mesh.dof())
    throw ValidationError("basis.json was built for a different mesh (" +
                          std::to_string(dof) + " dofs vs " +
                          std::to_string(mesh.dof()) + ")");
  if (m != config.num_modes)
    throw ValidationError("basis.json holds " + std::to_string(m) +
                          " modes but the config asks for " +
                          std::to_string(config.num_modes));
  basis.modes =
      unflatten_row_major(json.at("basis").get<std::vector<double>>(), dof, m);
  const auto eigenvalues = json.at("eigenvalues").get<std::vector<double>>();
  basis.eigenvalues =
      Eigen::Map<const Eigen::VectorXd>(eigenvalues.data(), eigenvalues.size());
  for (const auto& kind : json.at("modes").get<std::vector<std::string>>())
    basis.kinds.push_back(mode_kind_from_name(kind));

  return fem::reduce(model, basis);
}

void cmd_build_rom(const CommonFlags& flags) {
  const PipelineConfig config = load_with_overrides(flags);
  write_rom_artifacts(config);

  // mode table
  const fs::path out(config.output_dir);
  const nlohmann::json json = read_json_file(out / "basis.json");
  const auto eigenvalues = json.at("eigenvalues").get<std::vector<double>>();
  const auto kinds = json.at("modes").get<std::vector<std::string>>();
  std::cout << "mode  eigenvalue      kind\n";
  for (std::size_t i = 0; i < eigenvalues.size(); ++i)
    std::cout << i << (i < 10 ? "     " : "    ")
              << format_double(eigenvalues[i]) << "  " << kinds[i] << "\n";
  std::cout << "artifacts written to " << config.output_dir << "\n";
}

void cmd_run_mpc(const CommonFlags& flags) {
  const PipelineConfig config = load_with_overrides(flags);
  const fem::ReducedModel model = load_reduced_model(config);
  const sim::StepSolver solver(model, config.environment, config.mpc.dt);

  Eigen::MatrixXd control_basis;
  if (flags.bc_source == "identity") {
    control_basis =
        Eigen::MatrixXd::Identity(model.num_modes, config.control_dim);
  } else {
    const nlohmann::json json = read_json_file(flags.bc_source);
    const int m = json.at("m").get<int>();
    const int c = json.at("c").get<int>();
    if (m != model.num_modes)
      throw ValidationError("control basis file has m = " + std::to_string(m) +
                            " but the model has " +
                            std::to_string(model.num_modes) + " modes");
    if (c != config.control_dim)
      throw ValidationError("control basis file has c = " + std::to_string(c) +
                            " but the config asks for " +
                            std::to_string(config.control_dim));
    control_basis =
        unflatten_row_major(json.at("b_c").get<std::vector<double>>(), m, c);
    if (bo::orthonormality_error(control_basis) > 1e-8)
      throw ValidationError("control basis file is not orthonormal");
  }

  const auto t0 = std::chrono::steady_clock::now();
  const mpc::MpcResult result =
      mpc::mpc_run(solver, sim::rest_state(model.num_modes), control_basis,
                   config.rbbo.t_max, config.mpc, config.task, config.seed);
  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();

  const fs::path out(config.output_dir);
  {
    std::ofstream csv(out / "trajectory.csv", std::ios::trunc);
    if (!csv) throw IoError("cannot write trajectory.csv");
    csv << "t";
    for (int i = 0; i < model.num_modes; ++i) csv << ",q" << i;
    for (int i = 0; i < model.num_modes; ++i) csv << ",v" << i;
    for (int i = 0; i < config.control_dim; ++i) csv << ",f" << i;
    csv << ",reward\n";
    const sim::Trajectory& traj = result.trajectory;
    for (int n = 1; n <= traj.length(); ++n) {
      csv << format_double(traj.states[n].t);
      for (int i = 0; i < model.num_modes; ++i)
        csv << "," << format_double(traj.states[n].q[i]);
      for (int i = 0; i < model.num_modes; ++i)
        csv << "," << format_double(traj.states[n].v[i]);
      for (int i = 0; i < config.control_dim; ++i)
        csv << "," << format_double(traj.controls[n - 1][i]);
      csv << "," << format_double(traj.step_rewards[n - 1]) << "\n";
    }
  }

  int contact_count = 0;
  for (const sim::ContactSet& set : result.trajectory.contacts)
    contact_count += static_cast<int>(set.contacts.size());
  write_json_file(out / "summary.json",
                  nlohmann::json{{"schema_version", 1},
                                 {"reward", result.reward},
                                 {"lambda", result.regularizer},
                                 {"steps", result.stats.executed_steps},
                                 {"replans", result.stats.replans},
                                 {"contact_events", contact_count},
                                 {"nonconverged_steps",
                                  result.trajectory.nonconverged_steps},
                                 {"wall_time_s", wall},
                                 {"seed", config.seed},
                                 {"b_c_source", flags.bc_source}});
  std::cout << "reward " << format_double(result.reward) << "  lambda "
            << format_double(result.regularizer) << "  steps "
            << result.stats.executed_steps << "\n";
}

void cmd_run_rbbo(const CommonFlags& flags) {
  const PipelineConfig config = load_with_overrides(flags);
  const fem::ReducedModel model = load_reduced_model(config);
  const sim::StepSolver solver(model, config.environment, config.mpc.dt);

  const fs::path out(config.output_dir);
  const std::string dataset_path = out / "dataset.jsonl";

  std::vector<rbbo::EvalRecord> resume;
  if (flags.resume) {
    resume = rbbo::load_dataset(dataset_path);
    for (const rbbo::EvalRecord& record : resume)
      if (record.basis.rows() != model.num_modes ||
          record.basis.cols() != config.control_dim)
        throw ValidationError("dataset records do not match the config");
  }

  rbbo::RbboConfig rbbo_config = config.rbbo;
  rbbo_config.dataset_path = dataset_path;
  if (!flags.resume) {
    std::ofstream clear(dataset_path, std::ios::trunc);
    if (!clear) throw IoError("cannot write " + dataset_path);
  }

  const rbbo::RbboResult result =
      rbbo::rbbo(solver, config.task, rbbo_config, config.mpc, std::move(resume));

  const rbbo::EvalRecord baseline = rbbo::identity_baseline(
      solver, config.task, config.mpc, config.rbbo.t_max,
      mix_seed(config.seed, 0xba5eULL));

  write_json_file(out / "best_basis.json",
                  nlohmann::json{{"schema_version", 1},
                                 {"m", result.best_basis.rows()},
                                 {"c", result.best_basis.cols()},
                                 {"b_c", flatten_row_major(result.best_basis)},
                                 {"reward", result.best_reward},
                                 {"fidelity", config.rbbo.t_max}});
  write_convergence_csv(out / "convergence.csv", result.series);
  write_json_file(
      out / "report.json",
      nlohmann::json{{"schema_version", 1},
                     {"best_reward", result.best_reward},
                     {"baseline_reward", baseline.reward},
                     {"improvement",
                      baseline.reward != 0.0
                          ? result.best_reward / baseline.reward - 1.0
                          : std::numeric_limits<double>::quiet_NaN()},
                     {"records", result.records.size()},
                     {"executed_steps", result.executed_steps},
                     {"opt_rollouts", result.opt_rollouts},
                     {"series", series_json(result.series)}});
  std::cout << "best reward " << format_double(result.best_reward)
            << "  baseline " << format_double(baseline.reward) << "  records "
            << result.records.size() << "\n";
}

void cmd_compare(const CommonFlags& flags) {
  const PipelineConfig config = load_with_overrides(flags);
  const fem::ReducedModel model = load_reduced_model(config);
  const sim::StepSolver solver(model, config.environment, config.mpc.dt);
  if (!(config.rbbo.wall_budget_s > 0.0))
    throw ConfigError("compare needs rbbo.wall_budget_s > 0 in the config");

  const rbbo::CompareReport report = rbbo::compare_bo_vs_boca(
      solver, config.task, config.rbbo, config.mpc, config.rbbo.wall_budget_s);

  const fs::path out(config.output_dir);
  rbbo::write_dataset(out / "dataset_boca.jsonl", report.multi_fidelity.records);
  rbbo::write_dataset(out / "dataset_bo.jsonl", report.single_fidelity.records);
  write_convergence_csv(out / "convergence_boca.csv",
                        report.multi_fidelity.series);
  write_convergence_csv(out / "convergence_bo.csv",
                        report.single_fidelity.series);
  write_json_file(
      out / "compare_report.json",
      nlohmann::json{
          {"schema_version", 1},
          {"budget_s", report.budget_s},
          {"boca",
           {{"best_reward", report.multi_fidelity.best_reward},
            {"evaluations", report.multi_fidelity.records.size()},
            {"series", series_json(report.multi_fidelity.series)}}},
          {"bo",
           {{"best_reward", report.single_fidelity.best_reward},
            {"evaluations", report.single_fidelity.records.size()},
            {"series", series_json(report.single_fidelity.series)}}}});
  std::cout << "boca best " << format_double(report.multi_fidelity.best_reward)
            << " (" << report.multi_fidelity.records.size() << " evals)  bo best "
            << format_double(report.single_fidelity.best_reward) << " ("
            << report.single_fidelity.records.size() << " evals)\n";
}

void cmd_export(const CommonFlags& flags) {
  const PipelineConfig config = load_with_overrides(flags);
  const fem::Mesh mesh = fem::build_mesh(config.mesh);
  const fs::path out(config.output_dir);
  write_json_file(out / "mesh.json", mesh_geometry_json(mesh));

  // displaced mode shapes when ROM artifacts are present
  if (fs::exists(out / "basis.json")) {
    const fem::ReducedModel model = load_reduced_model(config);
    const double scale =
        0.1 * (mesh.nodes.colwise().maxCoeff() - mesh.nodes.colwise().minCoeff())
                  .maxCoeff();
    nlohmann::json modes = nlohmann::json::array();
    for (int m = 0; m < model.num_modes; ++m) {
      const Eigen::VectorXd displaced =
          model.rest + scale * model.basis.col(m);
      nlohmann::json nodes = nlohmann::json::array();
      for (int i = 0; i < model.num_nodes; ++i) {
        nlohmann::json node = nlohmann::json::array();
        for (int a = 0; a < model.dim; ++a)
          node.push_back(displaced[model.dim * i + a]);
        nodes.push_back(node);
      }
      modes.push_back({{"mode", m},
                       {"eigenvalue", model.eigenvalues[m]},
                       {"nodes", nodes}});
    }
    write_json_file(out / "modes.json",
                    nlohmann::json{{"schema_version", 1}, {"scale", scale},
                                   {"modes", modes}});
  }
  std::cout << "exported mesh.json" << (fs::exists(out / "modes.json") ?
                                        " and modes.json" : "")
            << " to " << config.output_dir << "\n";
}

}  // namespace romctl::cli
