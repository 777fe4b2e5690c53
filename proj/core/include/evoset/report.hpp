#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace evoset {

/// Anchor tags an invariant record may carry. Each names one identity,
/// inequality or construction being checked; "plumbing" marks checks of the
/// artifact itself.
const std::vector<std::string>& known_anchors();
bool is_known_anchor(const std::string& anchor);

struct InvariantRecord {
  std::string anchor;
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct RunReport {
  std::string task;
  std::vector<std::uint64_t> seeds;
  std::string env_digest;
  std::size_t workers = 1;
  double seconds = 0.0;
  std::vector<InvariantRecord> records;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::pair<std::string, std::string>> notes;
  std::vector<std::string> artifacts;

  /// Appends a record; unknown anchors are a kInvalidArgument error.
  InvariantRecord& add(std::string anchor, std::string name, bool pass, double measured, double tolerance,
                       std::string detail = {});
  /// Record for "measured <= tolerance".
  InvariantRecord& add_bound(std::string anchor, std::string name, double measured, double tolerance,
                             std::string detail = {});
  void metric(std::string key, double value) { metrics.emplace_back(std::move(key), value); }
  void note(std::string key, std::string value) { notes.emplace_back(std::move(key), std::move(value)); }
  bool all_pass() const;
};

std::string to_json(const RunReport& report);

}  // namespace evoset
