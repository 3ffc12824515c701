#include "romctl/rbbo/rbbo.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include "romctl/bo/acquisition.hpp"
#include "romctl/bo/gp.hpp"
#include "romctl/bo/grassmann.hpp"
#include "romctl/common/error.hpp"
#include "romctl/common/rng.hpp"

namespace romctl::rbbo {

namespace {

// seed streams; evaluation seeds depend only on the record index so a
// resumed run replays the interrupted one
constexpr std::uint64_t kEvalStream = 1000;
constexpr std::uint64_t kInitStream = 2000;
constexpr std::uint64_t kAcqStream = 3000;
constexpr std::uint64_t kHyperStream = 4000;

const char* controller_name(const mpc::MPCConfig& config) {
  return config.controller == mpc::ControllerKind::mppi ? "mppi"
                                                        : "gauss_newton";
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

void RbboConfig::validate() const {
  if (iterations < 0) throw ValidationError("iterations must be >= 0");
  if (initial_design < 2) throw ValidationError("initial design needs >= 2 points");
  if (t_max < 1) throw ValidationError("t_max must be >= 1");
  if (boca_threshold < 0.0) throw ValidationError("boca threshold must be >= 0");
  if (beta < 0.0) throw ValidationError("beta must be >= 0");
  if (hyperopt_interval < 1) throw ValidationError("hyperopt interval must be >= 1");
  if (wall_budget_s < 0.0) throw ValidationError("wall budget must be >= 0");
}

double gp_target(const EvalRecord& record, const RbboConfig& config) {
  if (!config.normalize_fidelity) return record.reward;
  return record.reward * (static_cast<double>(config.t_max) / record.fidelity);
}

EvalRecord identity_baseline(const sim::StepSolver& solver,
                             const sim::Task& task,
                             const mpc::MPCConfig& mpc_config, int t_max,
                             std::uint64_t seed) {
  const int m = solver.model().num_modes;
  const int c = mpc_config.control_dim;
  if (c > m) throw ValidationError("control dim exceeds mode count");
  const Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(m, c);

  const auto start = std::chrono::steady_clock::now();
  const mpc::MpcResult run =
      mpc::mpc_run(solver, sim::rest_state(m), basis, t_max, mpc_config, task,
                   seed);
  EvalRecord record;
  record.basis = basis;
  record.fidelity = t_max;
  record.reward = run.reward;
  record.regularizer = run.regularizer;
  record.wall_time_s = elapsed_s(start);
  record.seed = seed;
  record.controller = std::string(c == m ? "identity-full:" : "identity:") +
                      controller_name(mpc_config);
  return record;
}

RbboResult rbbo(const sim::StepSolver& solver, const sim::Task& task,
                const RbboConfig& config, const mpc::MPCConfig& mpc_config,
                std::vector<EvalRecord> resume) {
  config.validate();
  mpc_config.validate();
  const int m = solver.model().num_modes;
  const int c = mpc_config.control_dim;
  if (c >= m) throw ValidationError("control dim must be below mode count");

  const std::vector<int> ladder = bo::fidelity_ladder(config.t_max);
  const int lowest = config.multi_fidelity ? ladder.front() : config.t_max;
  const auto run_start = std::chrono::steady_clock::now();

  RbboResult result;
  result.records = std::move(resume);

  SimCounter opt_counter, exec_counter;
  double best_tmax = std::numeric_limits<double>::quiet_NaN();
  for (const EvalRecord& record : result.records)
    if (record.fidelity == config.t_max)
      best_tmax = std::isnan(best_tmax) ? record.reward
                                        : std::max(best_tmax, record.reward);

  auto evaluate = [&](const Eigen::MatrixXd& basis, int fidelity) {
    const std::uint64_t seed =
        mix_seed(config.seed, kEvalStream + result.records.size());
    const auto t0 = std::chrono::steady_clock::now();
    const mpc::MpcResult run =
        mpc::mpc_run(solver, sim::rest_state(m), basis, fidelity, mpc_config,
                     task, seed, &opt_counter, &exec_counter);
    EvalRecord record;
    record.basis = basis;
    record.fidelity = fidelity;
    record.reward = run.reward;
    record.regularizer = run.regularizer;
    record.wall_time_s = elapsed_s(t0);
    record.seed = seed;
    record.controller = controller_name(mpc_config);
    if (!config.dataset_path.empty())
      append_record(config.dataset_path, record);
    result.records.push_back(record);

    if (fidelity == config.t_max)
      best_tmax = std::isnan(best_tmax) ? record.reward
                                        : std::max(best_tmax, record.reward);
    result.series.push_back({static_cast<int>(result.records.size()),
                             elapsed_s(run_start), fidelity, record.reward,
                             best_tmax});
  };

  // initial design: uniform random bases at the cheapest fidelity
  while (static_cast<int>(result.records.size()) < config.initial_design) {
    Rng draw_rng(
        mix_seed(config.seed, kInitStream + result.records.size()));
    evaluate(bo::random_grassmann(m, c, draw_rng), lowest);
  }

  // kernel parameters are a pure function of a dataset prefix, cached per
  // prefix length so a resumed run recomputes the same values
  std::map<int, bo::KernelParams> theta_cache;
  auto kernel_params_for = [&](const std::vector<bo::GPRecord>& gp_records) {
    const int n = static_cast<int>(gp_records.size());
    const int prefix = config.hyperopt_interval *
                       (n / config.hyperopt_interval);
    if (prefix < 3) return bo::median_heuristic(gp_records);
    auto it = theta_cache.find(prefix);
    if (it != theta_cache.end()) return it->second;
    const std::vector<bo::GPRecord> head(gp_records.begin(),
                                         gp_records.begin() + prefix);
    const bo::KernelParams params = bo::gp_hyperopt(
        head, bo::HyperBounds::from_records(head),
        mix_seed(config.seed, kHyperStream + prefix));
    theta_cache.emplace(prefix, params);
    return params;
  };

  auto to_gp_records = [&]() {
    std::vector<bo::GPRecord> gp_records;
    gp_records.reserve(result.records.size());
    for (const EvalRecord& record : result.records)
      gp_records.push_back({record.basis,
                            static_cast<double>(record.fidelity),
                            gp_target(record, config)});
    return gp_records;
  };

  int iterations_done =
      std::max(0, static_cast<int>(result.records.size()) - config.initial_design);
  while (iterations_done < config.iterations) {
    if (config.wall_budget_s > 0.0 &&
        elapsed_s(run_start) >= config.wall_budget_s)
      break;

    const std::vector<bo::GPRecord> gp_records = to_gp_records();
    const bo::GPModel gp =
        bo::GPModel::fit(gp_records, kernel_params_for(gp_records));

    const double beta = config.beta > 0.0
                            ? config.beta
                            : bo::ucb_beta_schedule(iterations_done + 1);
    Rng acq_rng(mix_seed(config.seed, kAcqStream + result.records.size()));
    const Eigen::MatrixXd next = bo::maximize_acquisition(
        gp, beta, m, c, static_cast<double>(config.t_max), acq_rng);

    const int fidelity =
        config.multi_fidelity
            ? bo::boca_select_fidelity(gp, next, ladder, config.boca_threshold,
                                       config.t_max)
            : config.t_max;
    evaluate(next, fidelity);
    ++iterations_done;
  }

  // the final argmax is only meaningful at comparable fidelity: re-evaluate
  // the normalized best once when nothing was scored at t_max
  bool has_tmax = false;
  for (const EvalRecord& record : result.records)
    has_tmax = has_tmax || record.fidelity == config.t_max;
  if (!has_tmax) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(result.records.size()); ++i)
      if (gp_target(result.records[i], config) >
          gp_target(result.records[best], config))
        best = i;
    evaluate(result.records[best].basis, config.t_max);
  }

  int best = -1;
  for (int i = 0; i < static_cast<int>(result.records.size()); ++i) {
    if (result.records[i].fidelity != config.t_max) continue;
    if (best < 0 || result.records[i].reward > result.records[best].reward)
      best = i;
  }
  result.best_basis = result.records[best].basis;
  result.best_reward = result.records[best].reward;
  result.executed_steps = exec_counter.steps.load();
  result.opt_rollouts = opt_counter.rollouts.load();
  result.opt_rollout_steps = opt_counter.steps.load();
  return result;
}

CompareReport compare_bo_vs_boca(const sim::StepSolver& solver,
                                 const sim::Task& task, RbboConfig config,
                                 const mpc::MPCConfig& mpc_config,
                                 double wall_budget_s) {
  if (!(wall_budget_s > 0.0))
    throw ValidationError("comparison needs a positive wall budget");
  config.wall_budget_s = wall_budget_s;
  config.iterations = std::numeric_limits<int>::max() / 2;  // budget-bound

  CompareReport report;
  report.budget_s = wall_budget_s;

  RbboConfig boca = config;
  boca.multi_fidelity = true;
  if (!config.dataset_path.empty()) boca.dataset_path = config.dataset_path + ".boca";
  report.multi_fidelity = rbbo(solver, task, boca, mpc_config);

  RbboConfig bo_only = config;
  bo_only.multi_fidelity = false;
  if (!config.dataset_path.empty()) bo_only.dataset_path = config.dataset_path + ".bo";
  report.single_fidelity = rbbo(solver, task, bo_only, mpc_config);

  return report;
}

}  // namespace romctl::rbbo
