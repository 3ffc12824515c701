#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace romctl::rbbo {

// One evaluated candidate of the outer optimization. Immutable once written
// to the dataset file.
struct EvalRecord {
  Eigen::MatrixXd basis;      // orthonormal M x C control basis
  int fidelity = 0;           // executed timesteps T
  double reward = 0.0;        // cumulative R of the MPC run
  double regularizer = 0.0;   // cumulative Lambda
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
  std::string controller;
};

nlohmann::json record_to_json(const EvalRecord& record);
EvalRecord record_from_json(const nlohmann::json& json);

// JSON-lines persistence, append-only. Loading validates every record
// (orthonormal basis, fidelity >= 1, finite reward) and reports malformed
// lines by number.
void append_record(const std::string& path, const EvalRecord& record);
void write_dataset(const std::string& path,
                   const std::vector<EvalRecord>& records);
std::vector<EvalRecord> load_dataset(const std::string& path);

}  // namespace romctl::rbbo
