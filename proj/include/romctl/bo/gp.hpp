#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

#include "romctl/bo/kernel.hpp"

namespace romctl::bo {

struct GPRecord {
  Eigen::MatrixXd basis;
  double fidelity = 1.0;
  double value = 0.0;
};

struct Prediction {
  double mean = 0.0;
  double stddev = 0.0;
};

// Gaussian-process surrogate over (subspace, fidelity) pairs with constant
// mean (sample mean of the targets unless overridden). A default-constructed
// model is the prior: mean 0, stddev sigma_f.
class GPModel {
 public:
  GPModel() = default;

  // Cholesky of K + sigma_n^2 I with adaptive jitter (1e-10, x10 up to
  // 1e-4). Throws NumericError when even the largest jitter fails.
  static GPModel fit(std::vector<GPRecord> records, KernelParams params,
                     std::optional<double> prior_mean = {});

  Prediction predict(const Eigen::MatrixXd& basis, double fidelity) const;

  bool empty() const { return records_.empty(); }
  int size() const { return static_cast<int>(records_.size()); }
  const std::vector<GPRecord>& records() const { return records_; }
  const KernelParams& params() const { return params_; }
  double prior_mean() const { return mean_; }
  double jitter() const { return jitter_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }

  // (K + sigma_n^2 I + jitter I)^-1 rhs via the cached factorization
  Eigen::VectorXd solve_gram(const Eigen::VectorXd& rhs) const;

  // covariance vector between a query and the training inputs
  Eigen::VectorXd cross_covariance(const Eigen::MatrixXd& basis,
                                   double fidelity) const;

 private:
  std::vector<GPRecord> records_;
  KernelParams params_;
  double mean_ = 0.0;
  double jitter_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd alpha_;
};

// Log marginal likelihood of the records under the given parameters;
// -infinity when the Gram factorization fails.
double log_marginal_likelihood(const std::vector<GPRecord>& records,
                               const KernelParams& params);

struct HyperBounds {
  double signal_var_min = 1e-8, signal_var_max = 1e8;
  double length_basis_min = 1e-3, length_basis_max = 1e3;
  double length_fidelity_min = 1e-2, length_fidelity_max = 1e6;
  double noise_var_min = 1e-10, noise_var_max = 1e4;

  static HyperBounds from_records(const std::vector<GPRecord>& records);
};

// Median-heuristic fallback: length scales from the data spread, signal
// variance from the target variance.
KernelParams median_heuristic(const std::vector<GPRecord>& records);

// Maximizes the log marginal likelihood over log-parameters by multi-start
// coordinate search within the bounds; deterministic given the seed. Falls
// back to the median heuristic when no start produces a finite likelihood.
KernelParams gp_hyperopt(const std::vector<GPRecord>& records,
                         const HyperBounds& bounds, std::uint64_t seed);

}  // namespace romctl::bo
