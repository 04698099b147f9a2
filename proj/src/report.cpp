#include "aqft/report.hpp"

#include <sstream>

namespace aqft::report {

namespace {
constexpr const char* kToolVersion = "0.1.0";
}

int Report::passed() const {
  int n = 0;
  for (const auto& r : records)
    if (r.pass) ++n;
  return n;
}

int Report::failed() const { return static_cast<int>(records.size()) - passed(); }

nlohmann::json to_json(const Report& r, const nlohmann::json& config_echo,
                       double tolerance) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["tool_version"] = kToolVersion;
  j["config"] = config_echo;
  j["tolerance"] = tolerance;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.records) {
    nlohmann::json jc;
    jc["name"] = c.name;
    jc["law"] = c.law;
    jc["status"] = c.pass ? "pass" : "fail";
    jc["residual"] = c.residual;
    jc["witness"] = c.witness;
    j["checks"].push_back(jc);
  }
  j["summary"] = {{"total", r.records.size()},
                  {"passed", r.passed()},
                  {"failed", r.failed()}};
  return j;
}

Report from_json(const nlohmann::json& j) {
  Report r;
  for (const auto& jc : j.at("checks")) {
    CheckRecord c;
    c.name = jc.at("name").get<std::string>();
    c.law = jc.at("law").get<std::string>();
    c.pass = jc.at("status").get<std::string>() == "pass";
    c.residual = jc.at("residual").get<double>();
    c.witness = jc.at("witness").get<std::string>();
    r.add(std::move(c));
  }
  if (j.at("summary").at("total").get<size_t>() != r.records.size())
    throw Error("report: summary count does not match records");
  return r;
}

std::string to_text(const Report& r) {
  std::ostringstream os;
  for (const auto& c : r.records) {
    os << (c.pass ? "[pass] " : "[FAIL] ") << c.name;
    os << "  (" << c.law << ")";
    os << "  residual=" << c.residual;
    if (!c.witness.empty()) os << "  witness: " << c.witness;
    os << "\n";
  }
  os << r.passed() << "/" << r.records.size() << " checks passed\n";
  return os.str();
}

}  // namespace aqft::report
