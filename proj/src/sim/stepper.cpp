#include "romctl/sim/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "romctl/common/error.hpp"

namespace romctl::sim {

namespace {

constexpr int kMaxSetPasses = 8;
constexpr int kMaxStaggerIterations = 50;
constexpr int kMaxSweeps = 200;
constexpr double kForceTol = 1e-8;

// orthonormal tangent directions completing the contact normal
Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& normal) {
  const int d = static_cast<int>(normal.size());
  if (d == 2) {
    Eigen::MatrixXd t(2, 1);
    t << -normal[1], normal[0];
    return t;
  }
  Eigen::Vector3d n = normal;
  Eigen::Vector3d helper =
      std::abs(n.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  Eigen::MatrixXd t(3, 2);
  t.col(0) = n.cross(helper).normalized();
  t.col(1) = n.cross(Eigen::Vector3d(t.col(0))).normalized();
  return t;
}

}  // namespace

std::vector<Contact> detect_contacts(const fem::ReducedModel& model,
                                     const ReducedState& state,
                                     const Environment& env, double tol) {
  std::vector<Contact> found;
  if (env.mode != EnvMode::ground) return found;
  const Eigen::VectorXd positions = model.full_positions(state.q);
  const int d = model.dim;
  for (int i = 0; i < model.num_nodes; ++i) {
    const double gap =
        env.ground.normal.dot(positions.segment(d * i, d)) - env.ground.offset;
    if (gap <= tol) {
      Contact contact;
      contact.node = i;
      contact.normal = env.ground.normal;
      contact.gap = gap;
      contact.force = Eigen::VectorXd::Zero(d);
      found.push_back(contact);
    }
  }
  return found;
}

Eigen::VectorXd drag_force(const fem::ReducedModel& model,
                           const ReducedState& state, const Environment& env) {
  Eigen::VectorXd force_r = Eigen::VectorXd::Zero(model.num_modes);
  if (env.mode != EnvMode::fluid) return force_r;
  const Eigen::VectorXd positions = model.full_positions(state.q);
  const Eigen::VectorXd velocities = model.full_velocities(state.v);
  const int d = model.dim;
  Eigen::VectorXd normal;
  double area = 0.0;
  for (const fem::BoundaryFace& face : model.boundary) {
    fem::facet_normal_area(model.mesh, face, positions, normal, area);
    if (!(area > 0.0)) continue;
    Eigen::VectorXd face_velocity = Eigen::VectorXd::Zero(d);
    for (int v = 0; v < face.count; ++v)
      face_velocity += velocities.segment(d * face.nodes[v], d);
    face_velocity /= face.count;
    const double approach = normal.dot(face_velocity);
    if (approach <= 0.0) continue;  // trailing face
    const Eigen::VectorXd node_share = -(env.fluid.drag_coeff *
                                         env.fluid.density * area * approach *
                                         approach / face.count) *
                                        normal;
    for (int v = 0; v < face.count; ++v)
      force_r += model.node_rows(face.nodes[v]).transpose() * node_share;
  }
  return force_r;
}

StepSolver::StepSolver(const fem::ReducedModel& model, Environment env,
                       double dt)
    : model_(&model), env_(std::move(env)), dt_(dt) {
  if (!(dt > 0.0)) throw ValidationError("timestep must be positive");
  env_.validate();
  const int m = model.num_modes;
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(m, m) +
                                 dt * model.damping_r +
                                 dt * dt * model.stiffness_r;
  system_.compute(system);
  if (system_.info() != Eigen::Success)
    throw NumericError("implicit system is not positive definite");

  gravity_r_ = Eigen::VectorXd::Zero(m);
  if (env_.mode == EnvMode::ground && env_.gravity.size() == model.dim) {
    // B^T M g with g tiled over nodes
    for (int i = 0; i < model.num_nodes; ++i)
      gravity_r_ += model.node_rows(i).transpose() *
                    (model.node_mass[i] * env_.gravity);
  }
}

ContactSet StepSolver::solve_contact_forces(std::vector<Contact> candidates,
                                            const Eigen::VectorXd& v_free,
                                            Eigen::VectorXd* v_out) const {
  const fem::ReducedModel& model = *model_;
  const int d = model.dim;
  const int count = static_cast<int>(candidates.size());

  // velocity response per unit contact force: R_i = dt A^-1 J_i^T
  std::vector<Eigen::MatrixXd> response(count), tangents(count);
  std::vector<Eigen::MatrixXd> delassus(count);
  for (int i = 0; i < count; ++i) {
    const Eigen::MatrixXd j = model.node_rows(candidates[i].node);
    response[i] = dt_ * system_.solve(j.transpose());
    delassus[i] = j * response[i];
    tangents[i] = tangent_basis(candidates[i].normal);
    candidates[i].force = Eigen::VectorXd::Zero(d);
  }

  Eigen::VectorXd v_cur = v_free;
  auto node_velocity = [&](int i) {
    return Eigen::VectorXd(model.node_rows(candidates[i].node) * v_cur);
  };

  const double mu = env_.ground.friction;
  ContactSet result;
  result.converged = false;
  int outer = 0;
  for (; outer < kMaxStaggerIterations; ++outer) {
    double change = 0.0;

    // (a) projected Gauss-Seidel on normal force magnitudes
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      double sweep_change = 0.0;
      for (int i = 0; i < count; ++i) {
        const Eigen::VectorXd& n = candidates[i].normal;
        const double w_nn = n.dot(delassus[i] * n);
        if (w_nn < 1e-14) continue;  // basis cannot move this node
        const double vn = n.dot(node_velocity(i));
        const double lambda = n.dot(candidates[i].force);
        const double lambda_new = std::max(0.0, lambda - vn / w_nn);
        const double delta = lambda_new - lambda;
        if (delta == 0.0) continue;
        candidates[i].force += delta * n;
        v_cur += response[i] * (delta * n);
        sweep_change = std::max(sweep_change, std::abs(delta));
      }
      change = std::max(change, sweep_change);
      if (sweep_change < 1e-12) break;
    }

    // (b) tangential solve clamped to the friction cone
    if (mu > 0.0) {
      for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double sweep_change = 0.0;
        for (int i = 0; i < count; ++i) {
          const Eigen::VectorXd& n = candidates[i].normal;
          const Eigen::MatrixXd& t = tangents[i];
          const double bound = mu * n.dot(candidates[i].force);
          const Eigen::MatrixXd w_tt =
              t.transpose() * delassus[i] * t;  // (d-1) x (d-1)
          if (w_tt.norm() < 1e-14) continue;
          const Eigen::VectorXd vt = t.transpose() * node_velocity(i);
          Eigen::VectorXd coords = t.transpose() * candidates[i].force;
          Eigen::VectorXd target = coords - w_tt.ldlt().solve(vt);
          const double norm = target.norm();
          if (norm > bound) target *= (bound > 0.0 ? bound / norm : 0.0);
          const Eigen::VectorXd delta = target - coords;
          if (delta.cwiseAbs().maxCoeff() == 0.0) continue;
          candidates[i].force += t * delta;
          v_cur += response[i] * (t * delta);
          sweep_change = std::max(sweep_change, delta.cwiseAbs().maxCoeff());
        }
        change = std::max(change, sweep_change);
        if (sweep_change < 1e-12) break;
      }
    }

    if (change < kForceTol) {
      result.converged = true;
      ++outer;
      break;
    }
  }

  result.stagger_iterations = outer;
  result.reduced_force = Eigen::VectorXd::Zero(model.num_modes);
  for (int i = 0; i < count; ++i)
    result.reduced_force +=
        model.node_rows(candidates[i].node).transpose() * candidates[i].force;
  result.contacts = std::move(candidates);
  *v_out = v_cur;
  return result;
}

std::pair<ReducedState, ContactSet> StepSolver::step(
    const ReducedState& state, const Eigen::VectorXd& control) const {
  const fem::ReducedModel& model = *model_;
  if (control.size() != model.num_modes)
    throw ValidationError("control dimension does not match mode count");

  Eigen::VectorXd accel = gravity_r_ + control;
  if (env_.mode == EnvMode::fluid) accel += drag_force(model, state, env_);

  const Eigen::VectorXd rhs =
      state.v + dt_ * (-(model.stiffness_r * state.q) + accel);
  const Eigen::VectorXd v_free = system_.solve(rhs);

  ContactSet contact_set;
  contact_set.reduced_force = Eigen::VectorXd::Zero(model.num_modes);
  Eigen::VectorXd v_new = v_free;

  if (env_.mode == EnvMode::ground) {
    // fixed point on the active set: contacts are detected at the predicted
    // positions, so a resolved step never adds new penetration
    std::set<int> active;
    bool stable = false;
    for (int pass = 0; pass < kMaxSetPasses; ++pass) {
      ReducedState predicted{state.q + dt_ * v_new, v_new, state.t};
      std::vector<Contact> candidates =
          detect_contacts(model, predicted, env_, env_.contact_tol);
      std::set<int> nodes;
      for (const Contact& c : candidates) nodes.insert(c.node);
      if (nodes == active) {
        stable = true;
        break;
      }
      active = std::move(nodes);
      if (candidates.empty()) {
        contact_set = ContactSet{};
        contact_set.reduced_force = Eigen::VectorXd::Zero(model.num_modes);
        v_new = v_free;
        continue;
      }
      contact_set = solve_contact_forces(std::move(candidates), v_free, &v_new);
    }
    if (!stable || !contact_set.converged) {
      contact_set.converged = contact_set.converged && stable;
      if (!contact_set.converged)
        nonconverged_.fetch_add(1, std::memory_order_relaxed);
    }
  }

  ReducedState next;
  next.v = v_new;
  next.q = state.q + dt_ * v_new;
  next.t = state.t + dt_;
  return {std::move(next), std::move(contact_set)};
}

}  // namespace romctl::sim
