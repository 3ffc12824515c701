#include "romctl/rbbo/dataset.hpp"

#include <cmath>
#include <fstream>

#include "romctl/bo/grassmann.hpp"
#include "romctl/common/error.hpp"

namespace romctl::rbbo {

nlohmann::json record_to_json(const EvalRecord& record) {
  std::vector<double> flat;
  flat.reserve(record.basis.size());
  for (int i = 0; i < record.basis.rows(); ++i)
    for (int j = 0; j < record.basis.cols(); ++j)
      flat.push_back(record.basis(i, j));
  return nlohmann::json{{"schema_version", 1},
                        {"b_c", flat},
                        {"m", record.basis.rows()},
                        {"c", record.basis.cols()},
                        {"t", record.fidelity},
                        {"reward", record.reward},
                        {"lambda", record.regularizer},
                        {"seed", record.seed},
                        {"controller", record.controller},
                        {"wall_time_s", record.wall_time_s}};
}

EvalRecord record_from_json(const nlohmann::json& json) {
  EvalRecord record;
  const int m = json.at("m").get<int>();
  const int c = json.at("c").get<int>();
  const auto flat = json.at("b_c").get<std::vector<double>>();
  if (m < 1 || c < 1 || static_cast<int>(flat.size()) != m * c)
    throw ValidationError("b_c length does not match m * c");
  record.basis.resize(m, c);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < c; ++j) record.basis(i, j) = flat[i * c + j];
  record.fidelity = json.at("t").get<int>();
  record.reward = json.at("reward").get<double>();
  record.regularizer = json.at("lambda").get<double>();
  record.seed = json.at("seed").get<std::uint64_t>();
  record.controller = json.at("controller").get<std::string>();
  record.wall_time_s = json.at("wall_time_s").get<double>();

  if (record.fidelity < 1) throw ValidationError("fidelity must be >= 1");
  if (!std::isfinite(record.reward)) throw ValidationError("reward not finite");
  if (bo::orthonormality_error(record.basis) > 1e-8)
    throw ValidationError("control basis is not orthonormal");
  return record;
}

void append_record(const std::string& path, const EvalRecord& record) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot open dataset file " + path);
  out << record_to_json(record).dump() << "\n";
  if (!out) throw IoError("failed writing dataset file " + path);
}

void write_dataset(const std::string& path,
                   const std::vector<EvalRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open dataset file " + path);
  for (const EvalRecord& record : records)
    out << record_to_json(record).dump() << "\n";
  if (!out) throw IoError("failed writing dataset file " + path);
}

std::vector<EvalRecord> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file " + path);
  std::vector<EvalRecord> records;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    try {
      records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& error) {
      throw ValidationError("dataset line " + std::to_string(line_number) +
                            ": " + error.what());
    }
  }
  return records;
}

}  // namespace romctl::rbbo
