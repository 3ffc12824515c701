#pragma once

namespace romctl::fem {

// Isotropic linear elastic material with Rayleigh damping.
struct Material {
  double youngs_modulus = 1e5;  // Pa
  double poisson_ratio = 0.4;   // in (0, 0.5)
  double density = 1000.0;      // kg/m^3 (kg/m^2 in 2D)
  double rayleigh_alpha = 0.0;  // mass-proportional damping, 1/s
  double rayleigh_beta = 0.0;   // stiffness-proportional damping, s
};

void validate_material(const Material& material);

}  // namespace romctl::fem
