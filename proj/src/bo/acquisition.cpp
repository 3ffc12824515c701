#include "romctl/bo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "romctl/bo/grassmann.hpp"
#include "romctl/common/error.hpp"

namespace romctl::bo {

double ucb_beta_schedule(int iteration) {
  const int i = std::max(1, iteration);
  return 2.0 * std::log(static_cast<double>(i) * i * M_PI * M_PI / 0.6);
}

double ucb(const GPModel& gp, const Eigen::MatrixXd& basis, double fidelity,
           double beta) {
  if (beta < 0.0) throw ValidationError("ucb needs beta >= 0");
  const Prediction p = gp.predict(basis, fidelity);
  return p.mean + std::sqrt(beta) * p.stddev;
}

namespace {

// gamma and its Euclidean gradient in the frame entries. The kernel sees the
// frame only through projector overlaps |B^T B_i|_F^2, whose gradient is
// 4 B_i B_i^T B, so gamma inherits right-rotation invariance.
struct AcqEval {
  double value = 0.0;
  Eigen::MatrixXd gradient;
};

AcqEval evaluate_with_gradient(const GPModel& gp, const Eigen::MatrixXd& basis,
                               double fidelity, double beta) {
  AcqEval out;
  out.gradient = Eigen::MatrixXd::Zero(basis.rows(), basis.cols());
  if (gp.empty()) {
    out.value = ucb(gp, basis, fidelity, beta);
    return out;
  }
  const KernelParams& params = gp.params();
  const int n = gp.size();

  const Eigen::VectorXd cov = gp.cross_covariance(basis, fidelity);
  const Eigen::VectorXd weights = gp.solve_gram(cov);

  const double mean = gp.prior_mean() + cov.dot(gp.alpha());
  const double variance = std::max(0.0, params.signal_var - cov.dot(weights));
  const double stddev = std::sqrt(variance);
  out.value = mean + std::sqrt(beta) * stddev;

  // d k_i / dB = k_i / l_B^2 * 2 P_i B  (P_i = B_i B_i^T)
  const double inv_l2 = 1.0 / (params.length_basis * params.length_basis);
  std::vector<Eigen::MatrixXd> cov_grads(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd& bi = gp.records()[i].basis;
    cov_grads[i] = (2.0 * inv_l2 * cov[i]) * (bi * (bi.transpose() * basis));
  }
  for (int i = 0; i < n; ++i) out.gradient += gp.alpha()[i] * cov_grads[i];
  if (beta > 0.0 && stddev > 1e-12) {
    Eigen::MatrixXd var_grad = Eigen::MatrixXd::Zero(basis.rows(), basis.cols());
    for (int i = 0; i < n; ++i) var_grad -= 2.0 * weights[i] * cov_grads[i];
    out.gradient += std::sqrt(beta) / (2.0 * stddev) * var_grad;
  }
  return out;
}

Eigen::MatrixXd tangent_project(const Eigen::MatrixXd& basis,
                                const Eigen::MatrixXd& grad) {
  const Eigen::MatrixXd inner = basis.transpose() * grad;
  return grad - basis * (0.5 * (inner + inner.transpose()));
}

// ascent from one start; returns the final iterate and its gamma
std::pair<Eigen::MatrixXd, double> ascend(const GPModel& gp, double beta,
                                          double fidelity,
                                          Eigen::MatrixXd basis,
                                          const AcqOptions& options) {
  AcqEval eval = evaluate_with_gradient(gp, basis, fidelity, beta);
  double step = 1.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::MatrixXd tangent = tangent_project(basis, eval.gradient);
    const double tangent_norm2 = tangent.squaredNorm();
    if (std::sqrt(tangent_norm2) <= options.grad_tolerance) break;

    bool moved = false;
    for (int backtrack = 0; backtrack < 30; ++backtrack, step *= 0.5) {
      const Eigen::MatrixXd candidate = project_stiefel(basis + step * tangent);
      const AcqEval cand_eval =
          evaluate_with_gradient(gp, candidate, fidelity, beta);
      if (cand_eval.value >= eval.value + 1e-4 * step * tangent_norm2) {
        basis = candidate;
        eval = cand_eval;
        moved = true;
        step = std::min(step * 2.0, 1e3);
        break;
      }
    }
    if (!moved) break;
  }
  return {std::move(basis), eval.value};
}

}  // namespace

Eigen::MatrixXd maximize_acquisition(const GPModel& gp, double beta, int rows,
                                     int cols, double fidelity, Rng& rng,
                                     const AcqOptions& options) {
  std::vector<Eigen::MatrixXd> starts;
  for (int s = 0; s < options.random_starts; ++s)
    starts.push_back(random_grassmann(rows, cols, rng));
  if (!gp.empty() && options.incumbent_starts > 0) {
    // perturb the best recorded basis
    int best = 0;
    for (int i = 1; i < gp.size(); ++i)
      if (gp.records()[i].value > gp.records()[best].value) best = i;
    const Eigen::MatrixXd& incumbent = gp.records()[best].basis;
    for (int s = 0; s < options.incumbent_starts; ++s) {
      Eigen::MatrixXd noise(rows, cols);
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) noise(i, j) = rng.normal();
      starts.push_back(
          project_stiefel(incumbent + options.perturbation * noise));
    }
  }
  if (starts.empty()) starts.push_back(random_grassmann(rows, cols, rng));

  Eigen::MatrixXd best_basis = starts[0];
  double best_value = -std::numeric_limits<double>::infinity();
  for (const Eigen::MatrixXd& start : starts) {
    auto [basis, value] = ascend(gp, beta, fidelity, start, options);
    if (value > best_value) {
      best_value = value;
      best_basis = std::move(basis);
    }
  }
  return best_basis;
}

std::vector<int> fidelity_ladder(int t_max) {
  if (t_max < 1) throw ValidationError("t_max must be >= 1");
  std::vector<int> ladder;
  for (const int divisor : {8, 4, 2, 1}) {
    const int rung = std::max(
        1, static_cast<int>(std::lround(static_cast<double>(t_max) / divisor)));
    if (ladder.empty() || rung > ladder.back()) ladder.push_back(rung);
  }
  ladder.back() = t_max;
  return ladder;
}

int boca_select_fidelity(const GPModel& gp, const Eigen::MatrixXd& next_basis,
                         const std::vector<int>& ladder, double threshold,
                         int t_max) {
  if (ladder.empty()) throw ValidationError("fidelity ladder is empty");
  const double sigma_f = std::sqrt(gp.params().signal_var);
  for (const int rung : ladder) {
    if (rung >= t_max) break;
    const Prediction p = gp.predict(next_basis, rung);
    // the 1e-9 guard keeps exactly-interpolated rungs from re-qualifying
    // through round-off
    const double gate =
        threshold * sigma_f * (static_cast<double>(rung) / t_max) +
        1e-9 * sigma_f;
    if (p.stddev > gate) return rung;
  }
  return t_max;
}

}  // namespace romctl::bo
