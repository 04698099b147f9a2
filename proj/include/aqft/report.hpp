#pragma once

#include <string>
#include <vector>

#include "aqft/common.hpp"
#include "json.hpp"

namespace aqft::report {

/// One verification record: the check's name, the mathematical law it
/// certifies, the measured residual and an optional witness description.
struct CheckRecord {
  std::string name;
  std::string law;
  bool pass = false;
  double residual = 0.0;
  std::string witness;
};

struct Report {
  std::vector<CheckRecord> records;

  void add(CheckRecord r) { records.push_back(std::move(r)); }
  void add(const std::string& name, const std::string& law, bool pass,
           double residual = 0.0, const std::string& witness = "") {
    records.push_back({name, law, pass, residual, witness});
  }
  void merge(const Report& other) {
    records.insert(records.end(), other.records.begin(), other.records.end());
  }
  int passed() const;
  int failed() const;
  bool all_pass() const { return failed() == 0; }
};

nlohmann::json to_json(const Report& r, const nlohmann::json& config_echo,
                       double tolerance);
Report from_json(const nlohmann::json& j);
std::string to_text(const Report& r);

}  // namespace aqft::report
