#include "evoset/report.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "evoset/error.hpp"

namespace evoset {

const std::vector<std::string>& known_anchors() {
  static const std::vector<std::string> anchors = {
      "vertex-conductance",     "transition-rule",     "heat-kernel",
      "effective-monotonicity", "laziness",            "delayed-walk",
      "isoperimetric-growth",   "r-condition",         "heat-kernel-decay",
      "evolving-set-update",    "complement-duality",  "conditioned-kernel",
      "coupling",               "martingale",          "duality-identity",
      "drift-bounds",           "continuous-embedding", "csrw-thinning",
      "strong-transience",      "percolation-growth",  "lattice-isoperimetry",
      "plumbing",
  };
  return anchors;
}

bool is_known_anchor(const std::string& anchor) {
  const auto& all = known_anchors();
  return std::find(all.begin(), all.end(), anchor) != all.end();
}

InvariantRecord& RunReport::add(std::string anchor, std::string name, bool pass, double measured, double tolerance,
                                std::string detail) {
  if (!is_known_anchor(anchor)) fail(ErrorCode::kInvalidArgument, "unknown anchor '" + anchor + "'");
  records.push_back({std::move(anchor), std::move(name), pass, measured, tolerance, std::move(detail)});
  return records.back();
}

InvariantRecord& RunReport::add_bound(std::string anchor, std::string name, double measured, double tolerance,
                                      std::string detail) {
  const bool pass = std::isfinite(measured) && measured <= tolerance;
  return add(std::move(anchor), std::move(name), pass, measured, tolerance, std::move(detail));
}

bool RunReport::all_pass() const {
  return std::all_of(records.begin(), records.end(), [](const InvariantRecord& r) { return r.pass; });
}

namespace {

// JSON has no inf/nan; keep them readable as strings.
nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

std::string to_json(const RunReport& report) {
  nlohmann::ordered_json j;
  j["task"] = report.task;
  j["seeds"] = report.seeds;
  j["env_digest"] = report.env_digest;
  j["workers"] = report.workers;
  j["seconds"] = report.seconds;
  j["pass"] = report.all_pass();
  auto& recs = j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : report.records) {
    nlohmann::ordered_json o;
    o["anchor"] = r.anchor;
    o["name"] = r.name;
    o["pass"] = r.pass;
    o["measured"] = number(r.measured);
    o["tolerance"] = number(r.tolerance);
    if (!r.detail.empty()) o["detail"] = r.detail;
    recs.push_back(std::move(o));
  }
  auto& metrics = j["metrics"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.metrics) metrics[k] = number(v);
  auto& notes = j["notes"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.notes) notes[k] = v;
  j["artifacts"] = report.artifacts;
  return j.dump(2) + "\n";
}

}  // namespace evoset
