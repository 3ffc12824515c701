#pragma once

#include <Eigen/Dense>

#include <vector>

#include "romctl/bo/gp.hpp"
#include "romctl/common/rng.hpp"

namespace romctl::bo {

// GP-UCB exploration weight, beta_i = 2 log(i^2 pi^2 / 0.6), i >= 1.
double ucb_beta_schedule(int iteration);

// gamma = mu + sqrt(beta) sigma at the given fidelity.
double ucb(const GPModel& gp, const Eigen::MatrixXd& basis, double fidelity,
           double beta);

struct AcqOptions {
  int random_starts = 8;
  int incumbent_starts = 2;   // perturbations of the best recorded basis
  double perturbation = 0.1;
  int max_iterations = 100;
  double grad_tolerance = 1e-6;
};

// Multi-start Riemannian gradient ascent of the UCB over Gr(M, C): the
// Euclidean gradient is projected to the tangent space G - B sym(B^T G),
// steps retract by thin QR, and an Armijo backtracking search guards every
// move, so iterates never decrease gamma. Returns the best point seen.
Eigen::MatrixXd maximize_acquisition(const GPModel& gp, double beta, int rows,
                                     int cols, double fidelity, Rng& rng,
                                     const AcqOptions& options = {});

// Geometric fidelity ladder {T/8, T/4, T/2, T} rounded to whole steps.
std::vector<int> fidelity_ladder(int t_max);

// Smallest ladder fidelity whose posterior stddev at the candidate exceeds
// threshold * sigma_f * (T / T_max); T_max when every rung is already
// resolved. Cheap evaluations are preferred while the surrogate is still
// uncertain about them.
int boca_select_fidelity(const GPModel& gp, const Eigen::MatrixXd& next_basis,
                         const std::vector<int>& ladder, double threshold,
                         int t_max);

}  // namespace romctl::bo
