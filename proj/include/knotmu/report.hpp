#pragma once

// Machine-readable run reports for the command-line tool.

#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "knotmu/geom.hpp"
#include "knotmu/mu2.hpp"
#include "knotmu/quadrisecant.hpp"

namespace knotmu {

inline constexpr const char* kVersion = "0.1.0";

inline std::string content_hash(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return std::string("fnv1a64:") + buf;
}

/// One CLI run. `parity` is present exactly when the computation succeeded;
/// `timing_ms` only when requested, so reports are otherwise reproducible
/// byte for byte.
struct RunReport {
  std::string command;
  std::string file;
  std::string hash;
  std::string version = kVersion;
  std::optional<int> parity;
  nlohmann::json result = nlohmann::json::object();
  nlohmann::json degeneracies = nlohmann::json::array();
  nlohmann::json retries = nlohmann::json::array();
  std::optional<std::string> error;
  std::optional<double> timing_ms;

  nlohmann::json to_json() const {
    nlohmann::json j = {{"command", command},
                        {"input", {{"file", file}, {"hash", hash}}},
                        {"version", version},
                        {"result", result},
                        {"degeneracies", degeneracies},
                        {"retries", retries}};
    if (parity) j["parity"] = *parity;
    if (error) j["error"] = *error;
    if (timing_ms) j["timing_ms"] = *timing_ms;
    return j;
  }

  static RunReport from_json(const nlohmann::json& j) {
    RunReport r;
    try {
      r.command = j.at("command").get<std::string>();
      r.file = j.at("input").at("file").get<std::string>();
      r.hash = j.at("input").at("hash").get<std::string>();
      r.version = j.at("version").get<std::string>();
      r.result = j.at("result");
      r.degeneracies = j.at("degeneracies");
      r.retries = j.at("retries");
      if (j.contains("parity")) r.parity = j.at("parity").get<int>();
      if (j.contains("error")) r.error = j.at("error").get<std::string>();
      if (j.contains("timing_ms")) r.timing_ms = j.at("timing_ms").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("run report: ") + e.what());
    }
    return r;
  }
};

inline nlohmann::json to_json(const CyclePoint& p) {
  return {{"edge", p.edge}, {"curve", p.curve}, {"t", p.t}, {"phi", p.phi}, {"x", {p.at.x1, p.at.x2}}};
}

inline nlohmann::json to_json(const DegeneracyEvent& e) {
  nlohmann::json loc = nlohmann::json::array();
  for (const auto& p : e.location) loc.push_back(to_json(p));
  return {{"pattern", to_string(e.pattern)}, {"source", e.source}, {"evidence", e.evidence}, {"location", loc}};
}

inline nlohmann::json to_json(const RetryRecord& r) {
  return {{"seed", r.seed}, {"magnitude", r.magnitude}, {"events", r.events}};
}

inline nlohmann::json mu_result_json(const MuResult& r) {
  nlohmann::json four = nlohmann::json::array(), two = nlohmann::json::array();
  for (const auto& c : r.four_cycles) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : c.p) pts.push_back(to_json(p));
    four.push_back({{"orbit", c.orbit_id}, {"points", pts}, {"residual", {c.residual_f, c.residual_g}}});
  }
  for (const auto& c : r.two_cycles) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : c.p) pts.push_back(to_json(p));
    two.push_back({{"points", pts}, {"residual", c.residual}});
  }
  nlohmann::json j = {{"mu", r.mu},          {"n4", r.n4},           {"n2", r.n2},
                      {"raw_four", r.raw_four}, {"four_cycles", four}, {"two_cycles", two}};
  if (r.vote)
    j["vote"] = {{"trials", r.vote->trials},
                 {"ones", r.vote->ones},
                 {"zeros", r.vote->zeros},
                 {"failed", r.vote->failed},
                 {"unanimous", r.vote->unanimous()}};
  return j;
}

inline nlohmann::json to_json(const Point3& p) { return nlohmann::json::array({p.x, p.y, p.z}); }

inline nlohmann::json quad_result_json(const QuadResult& r) {
  nlohmann::json qs = nlohmann::json::array();
  for (const auto& q : r.quadrisecants) {
    nlohmann::json hits = nlohmann::json::array();
    for (const auto& h : q.hits) hits.push_back(to_json(h));
    nlohmann::json one = {{"point", to_json(q.point)},   {"direction", to_json(q.direction)},
                          {"knot_params", q.knot_params}, {"line_params", q.line_params},
                          {"line_order", q.line_order},   {"edges", q.edges},
                          {"hits", hits},                 {"pattern", q.pattern}};
    if (q.sign) one["sign"] = *q.sign;
    qs.push_back(one);
  }
  nlohmann::json j = {{"count", r.quadrisecants.size()}, {"parity", r.parity}, {"quadrisecants", qs}};
  if (r.signed_count) j["total"] = r.total;
  return j;
}

inline nlohmann::json to_json(const QuadEvent& e) {
  return {{"kind", e.kind}, {"edges", e.edges}, {"evidence", e.evidence}};
}

inline nlohmann::json to_json(const QuadRetry& r) {
  return {{"seed", r.seed}, {"magnitude", r.magnitude}, {"events", r.events}};
}

}  // namespace knotmu
