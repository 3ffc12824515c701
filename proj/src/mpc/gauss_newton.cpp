#include "romctl/mpc/gauss_newton.hpp"

#include <cmath>
#include <vector>

#include "romctl/common/error.hpp"
#include "romctl/common/parallel.hpp"

namespace romctl::mpc {

namespace {

// stacked positions of a rollout, q^2 .. q^{H+1}
Eigen::VectorXd stacked_positions(const sim::Trajectory& traj, int m) {
  const int h = traj.length();
  Eigen::VectorXd stacked(h * m);
  for (int n = 1; n <= h; ++n) stacked.segment((n - 1) * m, m) = traj.states[n].q;
  return stacked;
}

// per-step quadratic form of the state regularizer in the step velocity
Eigen::MatrixXd regularizer_state_form(const fem::ReducedModel& model,
                                       const sim::Task& task) {
  const int m = model.num_modes;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, m);
  for (const int mode : model.rotation_modes) p(mode, mode) += task.w_rot;
  const Eigen::MatrixXd perp =
      Eigen::MatrixXd::Identity(model.dim, model.dim) -
      task.direction * task.direction.transpose();
  p += task.w_perp * model.com_map.transpose() * perp * model.com_map;
  return p;
}

double fd_scale(const ControlSpline& spline) {
  return std::max(1.0, spline.control_points().cwiseAbs().maxCoeff());
}

}  // namespace

Eigen::MatrixXd gn_jacobian(const sim::StepSolver& solver,
                            const sim::ReducedState& start,
                            const Eigen::MatrixXd& control_basis,
                            const ControlSpline& spline,
                            const MPCConfig& config, SimCounter* counter) {
  const int k = spline.num_points();
  const int c = spline.channels();
  const int h = spline.horizon();
  const int m = solver.model().num_modes;
  const double step = config.gn.fd_step * fd_scale(spline);
  const sim::Task no_task{Eigen::VectorXd::Unit(solver.model().dim, 0), 0, 0, 0};

  Eigen::MatrixXd jacobian(h * m, k * c);
  parallel_for(k * c, config.threads, [&](int col) {
    const int point = col / c;
    const int channel = col % c;
    Eigen::MatrixXd plus = spline.control_points();
    Eigen::MatrixXd minus = spline.control_points();
    plus(point, channel) += step;
    minus(point, channel) -= step;
    const sim::Trajectory traj_plus = sim::rollout(
        solver, start, control_basis, spline.with_points(plus), h, no_task, counter);
    const sim::Trajectory traj_minus = sim::rollout(
        solver, start, control_basis, spline.with_points(minus), h, no_task, counter);
    jacobian.col(col) = (stacked_positions(traj_plus, m) -
                         stacked_positions(traj_minus, m)) /
                        (2.0 * step);
  });
  if (!jacobian.allFinite())
    throw NumericError("non-finite rollout in jacobian evaluation");
  return jacobian;
}

GnResult gauss_newton_update(const sim::StepSolver& solver,
                             const sim::ReducedState& start,
                             const Eigen::MatrixXd& control_basis,
                             const ControlSpline& spline,
                             const MPCConfig& config, const sim::Task& task,
                             const sim::Trajectory* nominal,
                             SimCounter* counter) {
  const fem::ReducedModel& model = solver.model();
  const int k = spline.num_points();
  const int c = spline.channels();
  const int h = spline.horizon();
  const int m = model.num_modes;
  const double dt = solver.dt();

  int rollouts = 0;
  int ls_evals = 0;
  auto evaluate = [&](const ControlSpline& candidate) {
    ++rollouts;
    ++ls_evals;
    return sim::rollout(solver, start, control_basis, candidate, h, task, counter);
  };

  sim::Trajectory nominal_traj;
  if (nominal != nullptr)
    nominal_traj = *nominal;
  else
    nominal_traj = evaluate(spline);
  const double objective = nominal_traj.reward - nominal_traj.regularizer;

  const Eigen::MatrixXd jacobian =
      gn_jacobian(solver, start, control_basis, spline, config, counter);
  rollouts += 2 * k * c;

  // objective gradient in the stacked positions; the reward telescopes to
  // d^T com_map (q^{H+1} - q^1), so only the last block carries it
  const Eigen::MatrixXd p = regularizer_state_form(model, task);
  Eigen::VectorXd grad_q = Eigen::VectorXd::Zero(h * m);
  grad_q.tail(m) = model.com_map.transpose() * task.direction;
  for (int n = 1; n <= h; ++n) {
    Eigen::VectorXd g = (2.0 / dt) * (p * nominal_traj.states[n].v);
    if (n < h) g -= (2.0 / dt) * (p * nominal_traj.states[n + 1].v);
    grad_q.segment((n - 1) * m, m) -= g;
  }

  // control-effort term, in the same point-major vectorization as jacobian
  const Eigen::MatrixXd basis_gram =
      spline.weights().transpose() * spline.weights();
  const Eigen::MatrixXd control_grad_matrix =
      2.0 * task.w_control * basis_gram * spline.control_points();
  Eigen::VectorXd gradient(k * c);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < c; ++j)
      gradient[i * c + j] = -control_grad_matrix(i, j);
  gradient += jacobian.transpose() * grad_q;

  // Gauss-Newton matrix: J^T (hess Lambda_state) J, computed blockwise over
  // the tridiagonal state Hessian, plus the control-effort curvature
  Eigen::MatrixXd gn = Eigen::MatrixXd::Zero(k * c, k * c);
  const double inv_dt2 = 1.0 / (dt * dt);
  const auto block = [&](int row) {
    return jacobian.middleRows((row - 1) * m, m);
  };
  for (int n = 1; n <= h; ++n) {
    Eigen::MatrixXd combined = (n < h ? 2.0 : 1.0) * block(n);
    if (n >= 2) combined -= block(n - 1);
    if (n < h) combined -= block(n + 1);
    gn.noalias() += 2.0 * inv_dt2 * block(n).transpose() * (p * combined);
  }
  for (int i = 0; i < k; ++i)
    for (int i2 = 0; i2 < k; ++i2)
      for (int j = 0; j < c; ++j)
        gn(i * c + j, i2 * c + j) += 2.0 * task.w_control * basis_gram(i, i2);
  gn = 0.5 * (gn + gn.transpose()).eval();
  gn.diagonal().array() += config.gn.levenberg;

  const Eigen::VectorXd direction = gn.llt().solve(gradient);
  if (!direction.allFinite())
    throw NumericError("gauss-newton direction is not finite");
  if (direction.cwiseAbs().maxCoeff() < 1e-14)
    return {spline, std::move(nominal_traj), objective, false, 0.0, ls_evals,
            rollouts};

  double alpha = config.gn.step;
  for (int halving = 0; halving < 8; ++halving, alpha *= 0.5) {
    Eigen::MatrixXd points = spline.control_points();
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < c; ++j) points(i, j) += alpha * direction[i * c + j];
    ControlSpline candidate = spline.with_points(std::move(points));
    sim::Trajectory traj = evaluate(candidate);
    const double value = traj.reward - traj.regularizer;
    if (value > objective)
      return {std::move(candidate), std::move(traj), value, true, alpha,
              ls_evals, rollouts};
  }
  return {spline, std::move(nominal_traj), objective, false, 0.0, ls_evals,
          rollouts};
}

}  // namespace romctl::mpc
