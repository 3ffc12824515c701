#include "romctl/bo/kernel.hpp"

#include <cmath>

#include "romctl/bo/grassmann.hpp"
#include "romctl/common/error.hpp"

namespace romctl::bo {

void KernelParams::validate() const {
  if (!(signal_var > 0.0) || !(length_basis > 0.0) ||
      !(length_fidelity > 0.0) || !(noise_var > 0.0))
    throw ValidationError("kernel parameters must be strictly positive");
}

double kernel_from_distance(double basis_distance, double fidelity_gap,
                            const KernelParams& params) {
  const double db = basis_distance / params.length_basis;
  const double dt = fidelity_gap / params.length_fidelity;
  return params.signal_var * std::exp(-0.5 * (db * db + dt * dt));
}

double kernel(const Eigen::MatrixXd& basis_i, double fidelity_i,
              const Eigen::MatrixXd& basis_j, double fidelity_j,
              const KernelParams& params) {
  return kernel_from_distance(grassmann_distance(basis_i, basis_j),
                              std::abs(fidelity_i - fidelity_j), params);
}

}  // namespace romctl::bo
