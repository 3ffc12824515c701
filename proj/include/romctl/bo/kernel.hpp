#pragma once

#include <Eigen/Dense>

namespace romctl::bo {

struct KernelParams {
  double signal_var = 1.0;       // sigma_f^2
  double length_basis = 1.0;     // projector-distance units
  double length_fidelity = 1.0;  // timestep units
  double noise_var = 1e-6;       // sigma_n^2

  void validate() const;
};

// Separable squared-exponential: radial in the projector distance times
// radial in the fidelity gap. Positive definite on the Grassmannian because
// the distance is Euclidean in the embedded projector space.
double kernel_from_distance(double basis_distance, double fidelity_gap,
                            const KernelParams& params);

double kernel(const Eigen::MatrixXd& basis_i, double fidelity_i,
              const Eigen::MatrixXd& basis_j, double fidelity_j,
              const KernelParams& params);

}  // namespace romctl::bo
