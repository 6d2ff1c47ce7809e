#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

namespace qamp {

/// One checked inequality lhs <= rhs + tolerance.
struct CheckRecord {
  std::string id;
  std::string statement;
  double lhs = 0;
  double rhs = 0;
  double tolerance = 0;
  bool pass = false;

  double slack() const { return rhs - lhs; }
};

class VerificationLedger {
 public:
  static constexpr int kSchemaVersion = 1;

  const CheckRecord& add(std::string id, std::string statement, double lhs, double rhs, double tolerance) {
    CheckRecord r{std::move(id), std::move(statement), lhs, rhs, tolerance, lhs <= rhs + tolerance};
    records_.push_back(std::move(r));
    return records_.back();
  }

  void append(const VerificationLedger& other) {
    records_.insert(records_.end(), other.records_.begin(), other.records_.end());
  }

  const std::vector<CheckRecord>& records() const { return records_; }
  bool all_pass() const {
    for (const auto& r : records_)
      if (!r.pass) return false;
    return true;
  }
  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& r : records_) n += !r.pass;
    return n;
  }
  double worst_slack() const {
    double w = 1e300;
    for (const auto& r : records_) w = std::min(w, r.slack());
    return w;
  }

  nlohmann::json meta = nlohmann::json::object();

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["schema"] = "qamp-ledger";
    j["version"] = kSchemaVersion;
    j["meta"] = meta;
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : records_)
      recs.push_back({{"id", r.id},
                      {"statement", r.statement},
                      {"lhs", r.lhs},
                      {"rhs", r.rhs},
                      {"slack", r.slack()},
                      {"tolerance", r.tolerance},
                      {"pass", r.pass}});
    j["records"] = std::move(recs);
    j["all_pass"] = all_pass();
    return j;
  }

 private:
  std::vector<CheckRecord> records_;
};

}  // namespace qamp
