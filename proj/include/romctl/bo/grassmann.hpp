#pragma once

#include <Eigen/Dense>

#include "romctl/common/rng.hpp"

namespace romctl::bo {

// Points of Gr(M, C) are represented by orthonormal M x C frames; every
// consumer is invariant to right-rotation, so a frame is just a
// representative of the projector B B^T.

// Thin orthonormal factor of a standard Gaussian matrix: uniform on the
// Grassmannian by rotation invariance. Column signs are normalized so the
// draw is a deterministic function of the rng stream.
Eigen::MatrixXd random_grassmann(int rows, int cols, Rng& rng);

// Flips each column so its largest-magnitude entry is positive.
void normalize_signs(Eigen::MatrixXd& frame);

// max |B^T B - I|
double orthonormality_error(const Eigen::MatrixXd& frame);

// Nearest orthonormal frame via thin QR with positive R diagonal; the
// retraction used by the acquisition ascent.
Eigen::MatrixXd project_stiefel(const Eigen::MatrixXd& frame);

// Frobenius distance of the subspace projectors, evaluated without the
// M x M embedding: sqrt(2C - 2 |a^T b|_F^2), clamped at zero.
double grassmann_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace romctl::bo
