#include "romctl/bo/grassmann.hpp"

#include <cmath>

#include "romctl/common/error.hpp"

namespace romctl::bo {

void normalize_signs(Eigen::MatrixXd& frame) {
  for (int c = 0; c < frame.cols(); ++c) {
    int row = 0;
    frame.col(c).cwiseAbs().maxCoeff(&row);
    if (frame(row, c) < 0.0) frame.col(c) = -frame.col(c);
  }
}

double orthonormality_error(const Eigen::MatrixXd& frame) {
  const Eigen::MatrixXd gram = frame.transpose() * frame;
  return (gram - Eigen::MatrixXd::Identity(frame.cols(), frame.cols()))
      .cwiseAbs()
      .maxCoeff();
}

Eigen::MatrixXd project_stiefel(const Eigen::MatrixXd& frame) {
  const int cols = static_cast<int>(frame.cols());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(frame);
  Eigen::MatrixXd q = qr.householderQ() *
                      Eigen::MatrixXd::Identity(frame.rows(), cols);
  const Eigen::MatrixXd r =
      qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (int c = 0; c < cols; ++c)
    if (r(c, c) < 0.0) q.col(c) = -q.col(c);
  return q;
}

Eigen::MatrixXd random_grassmann(int rows, int cols, Rng& rng) {
  if (cols < 1 || cols >= rows)
    throw ValidationError("need 1 <= subspace dim < ambient dim");
  for (int attempt = 0; attempt < 16; ++attempt) {
    Eigen::MatrixXd gaussian(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) gaussian(i, j) = rng.normal();
    Eigen::MatrixXd frame = project_stiefel(gaussian);
    if (orthonormality_error(frame) < 1e-10) {
      normalize_signs(frame);
      return frame;
    }
    // rank-deficient draw has probability zero; redraw
  }
  throw NumericError("failed to draw a random orthonormal frame");
}

double grassmann_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError("grassmann distance needs matching shapes");
  const double overlap = (a.transpose() * b).squaredNorm();
  const double squared = 2.0 * a.cols() - 2.0 * overlap;
  return std::sqrt(std::max(0.0, squared));
}

}  // namespace romctl::bo
