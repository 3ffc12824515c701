#include "romctl/bo/gp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "romctl/bo/grassmann.hpp"
#include "romctl/common/error.hpp"
#include "romctl/common/rng.hpp"

namespace romctl::bo {

namespace {

Eigen::MatrixXd gram_matrix(const std::vector<GPRecord>& records,
                            const KernelParams& params) {
  const int n = static_cast<int>(records.size());
  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i) {
    gram(i, i) = params.signal_var + params.noise_var;
    for (int j = i + 1; j < n; ++j) {
      const double value = kernel(records[i].basis, records[i].fidelity,
                                  records[j].basis, records[j].fidelity, params);
      gram(i, j) = value;
      gram(j, i) = value;
    }
  }
  return gram;
}

double sample_mean(const std::vector<GPRecord>& records) {
  double sum = 0.0;
  for (const GPRecord& r : records) sum += r.value;
  return records.empty() ? 0.0 : sum / records.size();
}

bool factorize_with_jitter(const Eigen::MatrixXd& gram,
                           Eigen::LLT<Eigen::MatrixXd>* chol, double* jitter) {
  // first attempt without jitter, then the adaptive ladder
  *jitter = 0.0;
  chol->compute(gram);
  if (chol->info() == Eigen::Success) return true;
  for (double j = 1e-10; j <= 1e-4 * 1.0000001; j *= 10.0) {
    Eigen::MatrixXd padded = gram;
    padded.diagonal().array() += j;
    chol->compute(padded);
    if (chol->info() == Eigen::Success) {
      *jitter = j;
      return true;
    }
  }
  return false;
}

}  // namespace

GPModel GPModel::fit(std::vector<GPRecord> records, KernelParams params,
                     std::optional<double> prior_mean) {
  if (records.empty()) throw ValidationError("gp fit needs at least one record");
  params.validate();

  GPModel model;
  model.records_ = std::move(records);
  model.params_ = params;
  model.mean_ = prior_mean ? *prior_mean : sample_mean(model.records_);

  const Eigen::MatrixXd gram = gram_matrix(model.records_, params);
  if (!factorize_with_jitter(gram, &model.chol_, &model.jitter_))
    throw NumericError("gp gram matrix is not positive definite");

  const int n = model.size();
  Eigen::VectorXd centered(n);
  for (int i = 0; i < n; ++i) centered[i] = model.records_[i].value - model.mean_;
  model.alpha_ = model.chol_.solve(centered);
  return model;
}

Eigen::VectorXd GPModel::cross_covariance(const Eigen::MatrixXd& basis,
                                          double fidelity) const {
  const int n = size();
  Eigen::VectorXd cov(n);
  for (int i = 0; i < n; ++i)
    cov[i] = kernel(basis, fidelity, records_[i].basis, records_[i].fidelity,
                    params_);
  return cov;
}

Prediction GPModel::predict(const Eigen::MatrixXd& basis,
                            double fidelity) const {
  if (empty()) return {mean_, std::sqrt(params_.signal_var)};
  const Eigen::VectorXd cov = cross_covariance(basis, fidelity);
  const double mean = mean_ + cov.dot(alpha_);
  const double variance = params_.signal_var - cov.dot(chol_.solve(cov));
  return {mean, std::sqrt(std::max(0.0, variance))};
}

Eigen::VectorXd GPModel::solve_gram(const Eigen::VectorXd& rhs) const {
  return chol_.solve(rhs);
}

double log_marginal_likelihood(const std::vector<GPRecord>& records,
                               const KernelParams& params) {
  const int n = static_cast<int>(records.size());
  if (n == 0) return -std::numeric_limits<double>::infinity();
  const Eigen::MatrixXd gram = gram_matrix(records, params);
  Eigen::LLT<Eigen::MatrixXd> chol;
  double jitter = 0.0;
  if (!factorize_with_jitter(gram, &chol, &jitter))
    return -std::numeric_limits<double>::infinity();
  const double mean = sample_mean(records);
  Eigen::VectorXd centered(n);
  for (int i = 0; i < n; ++i) centered[i] = records[i].value - mean;
  const Eigen::VectorXd alpha = chol.solve(centered);
  double log_det = 0.0;
  for (int i = 0; i < n; ++i) log_det += std::log(chol.matrixLLT()(i, i));
  const double lml = -0.5 * centered.dot(alpha) - log_det -
                     0.5 * n * std::log(2.0 * M_PI);
  return std::isfinite(lml) ? lml
                            : -std::numeric_limits<double>::infinity();
}

KernelParams median_heuristic(const std::vector<GPRecord>& records) {
  KernelParams params;

  std::vector<double> distances;
  double fid_min = std::numeric_limits<double>::infinity();
  double fid_max = -fid_min;
  for (std::size_t i = 0; i < records.size(); ++i) {
    fid_min = std::min(fid_min, records[i].fidelity);
    fid_max = std::max(fid_max, records[i].fidelity);
    for (std::size_t j = i + 1; j < records.size(); ++j) {
      const double d = grassmann_distance(records[i].basis, records[j].basis);
      if (d > 0.0) distances.push_back(d);
    }
  }
  if (distances.empty()) {
    const double c =
        records.empty() ? 1.0 : static_cast<double>(records[0].basis.cols());
    params.length_basis = 0.5 * std::sqrt(2.0 * c);
  } else {
    std::nth_element(distances.begin(),
                     distances.begin() + distances.size() / 2, distances.end());
    params.length_basis = distances[distances.size() / 2];
  }

  const double fid_range = records.empty() ? 0.0 : fid_max - fid_min;
  params.length_fidelity =
      fid_range > 0.0 ? 0.5 * fid_range : std::max(1.0, 0.5 * fid_max);

  const double mean = sample_mean(records);
  double var = 0.0;
  for (const GPRecord& r : records) var += (r.value - mean) * (r.value - mean);
  if (!records.empty()) var /= records.size();
  params.signal_var = std::max(var, 1e-8);
  params.noise_var = 1e-4 * params.signal_var;
  return params;
}

HyperBounds HyperBounds::from_records(const std::vector<GPRecord>& records) {
  HyperBounds bounds;
  const KernelParams base = median_heuristic(records);
  bounds.signal_var_min = 1e-4 * base.signal_var;
  bounds.signal_var_max = 1e4 * base.signal_var;
  const double c =
      records.empty() ? 1.0 : static_cast<double>(records[0].basis.cols());
  const double max_distance = std::sqrt(2.0 * c);
  bounds.length_basis_min = 0.02 * max_distance;
  bounds.length_basis_max = 4.0 * max_distance;
  bounds.length_fidelity_min = std::max(1e-2, 0.05 * base.length_fidelity);
  bounds.length_fidelity_max = 20.0 * base.length_fidelity;
  bounds.noise_var_min = 1e-8 * base.signal_var;
  bounds.noise_var_max = 1.0 * base.signal_var;
  return bounds;
}

namespace {

struct LogBox {
  std::array<double, 4> lo, hi;
};

double evaluate_log_params(const std::vector<GPRecord>& records,
                           const std::array<double, 4>& log_params) {
  KernelParams params;
  params.signal_var = std::exp(log_params[0]);
  params.length_basis = std::exp(log_params[1]);
  params.length_fidelity = std::exp(log_params[2]);
  params.noise_var = std::exp(log_params[3]);
  return log_marginal_likelihood(records, params);
}

// coarse scan then golden-section refinement along one coordinate
void line_search_coordinate(const std::vector<GPRecord>& records,
                            std::array<double, 4>* point, int coord,
                            const LogBox& box, double* best_value) {
  const double lo = box.lo[coord], hi = box.hi[coord];
  if (!(hi > lo)) return;
  std::array<double, 4> probe = *point;

  double grid_best = (*point)[coord];
  double grid_value = *best_value;
  const int grid = 13;
  for (int g = 0; g < grid; ++g) {
    probe[coord] = lo + (hi - lo) * g / (grid - 1);
    const double value = evaluate_log_params(records, probe);
    if (value > grid_value) {
      grid_value = value;
      grid_best = probe[coord];
    }
  }

  const double span = (hi - lo) / (grid - 1);
  double a = std::max(lo, grid_best - span);
  double b = std::min(hi, grid_best + span);
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - ratio * (b - a);
  double x2 = a + ratio * (b - a);
  probe[coord] = x1;
  double f1 = evaluate_log_params(records, probe);
  probe[coord] = x2;
  double f2 = evaluate_log_params(records, probe);
  for (int it = 0; it < 20; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      probe[coord] = x2;
      f2 = evaluate_log_params(records, probe);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      probe[coord] = x1;
      f1 = evaluate_log_params(records, probe);
    }
  }
  const double candidate = f1 > f2 ? x1 : x2;
  probe[coord] = candidate;
  const double value = evaluate_log_params(records, probe);
  if (value > grid_value) {
    grid_value = value;
    grid_best = candidate;
  }
  if (grid_value > *best_value) {
    (*point)[coord] = grid_best;
    *best_value = grid_value;
  }
}

}  // namespace

KernelParams gp_hyperopt(const std::vector<GPRecord>& records,
                         const HyperBounds& bounds, std::uint64_t seed) {
  if (records.size() < 3)
    throw ValidationError("hyperparameter optimization needs >= 3 records");

  LogBox box;
  box.lo = {std::log(bounds.signal_var_min), std::log(bounds.length_basis_min),
            std::log(bounds.length_fidelity_min), std::log(bounds.noise_var_min)};
  box.hi = {std::log(bounds.signal_var_max), std::log(bounds.length_basis_max),
            std::log(bounds.length_fidelity_max), std::log(bounds.noise_var_max)};

  const KernelParams fallback = median_heuristic(records);
  auto clamp_log = [&](double value, int coord) {
    return std::min(box.hi[coord], std::max(box.lo[coord], value));
  };

  std::vector<std::array<double, 4>> starts;
  starts.push_back({clamp_log(std::log(fallback.signal_var), 0),
                    clamp_log(std::log(fallback.length_basis), 1),
                    clamp_log(std::log(fallback.length_fidelity), 2),
                    clamp_log(std::log(fallback.noise_var), 3)});
  Rng rng(mix_seed(seed, 0x67705fULL));
  for (int s = 0; s < 3; ++s) {
    std::array<double, 4> start;
    for (int c = 0; c < 4; ++c)
      start[c] = rng.uniform(box.lo[c], box.hi[c]);
    starts.push_back(start);
  }

  std::array<double, 4> best = starts[0];
  double best_value = -std::numeric_limits<double>::infinity();
  for (auto& start : starts) {
    double value = evaluate_log_params(records, start);
    for (int pass = 0; pass < 2; ++pass)
      for (int coord = 0; coord < 4; ++coord)
        line_search_coordinate(records, &start, coord, box, &value);
    if (value > best_value) {
      best_value = value;
      best = start;
    }
  }
  if (!std::isfinite(best_value)) return fallback;

  KernelParams result;
  result.signal_var = std::exp(best[0]);
  result.length_basis = std::exp(best[1]);
  result.length_fidelity = std::exp(best[2]);
  result.noise_var = std::exp(best[3]);
  return result;
}

}  // namespace romctl::bo
