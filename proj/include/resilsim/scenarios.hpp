#pragma once

// Built-in scenarios: the three case-study solutions plus two
// metrics-validation setups. Each exports a plain config document.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "resilsim/engine.hpp"

namespace resilsim {

struct Expectation {
  std::string description;
  std::function<std::optional<std::string>(const SimResult&)> check;  // nullopt = satisfied
};

struct Scenario {
  std::string name;
  std::string summary;
  Json config;
  std::string detection_instance;  // removing it must leave the solution incomplete
  std::vector<Expectation> expectations;

  SimConfig build() const { return parse_config(config); }

  SimConfig build(std::uint64_t seed) const {
    auto cfg = build();
    cfg.seed = seed;
    return cfg;
  }

  /// The config with one solution instance removed.
  Json without(const std::string& instance_id) const {
    Json doc = config;
    Json kept = Json::array();
    for (const auto& inst : doc["solution"]) {
      if (inst["id"] != instance_id) kept.push_back(inst);
    }
    doc["solution"] = kept;
    return doc;
  }
};

struct ExpectationOutcome {
  std::string description;
  bool pass = false;
  std::string detail;
};

inline std::vector<ExpectationOutcome> check_expectations(const Scenario& s, const SimResult& r) {
  std::vector<ExpectationOutcome> out;
  for (const auto& e : s.expectations) {
    const auto failure = e.check(r);
    out.push_back({e.description, !failure, failure.value_or("")});
  }
  return out;
}

/// True when records of the given kinds occur in order (not necessarily
/// adjacent), optionally restricted to one component.
inline bool has_motif(const std::vector<TraceRecord>& trace, const std::vector<RecordKind>& kinds,
                      const std::string& comp = "") {
  std::size_t next = 0;
  for (const auto& r : trace) {
    if (next == kinds.size()) break;
    if (!comp.empty() && r.comp != comp) continue;
    if (r.kind == kinds[next]) ++next;
  }
  return next == kinds.size();
}

inline std::vector<const TraceRecord*> records_of(const std::vector<TraceRecord>& trace, RecordKind kind,
                                                  const std::string& comp = "") {
  std::vector<const TraceRecord*> out;
  for (const auto& r : trace) {
    if (r.kind == kind && (comp.empty() || r.comp == comp)) out.push_back(&r);
  }
  return out;
}

namespace detail {

inline Expectation expect_complete() {
  return {"solution validates complete", [](const SimResult& r) -> std::optional<std::string> {
            if (r.verdict.complete) return std::nullopt;
            return verdict_to_text(r.verdict);
          }};
}

inline Expectation expect_kinds(std::set<std::string> kinds) {
  std::string names;
  for (const auto& k : kinds) names += (names.empty() ? "" : ",") + k;
  return {"structure kinds = {" + names + "}", [kinds](const SimResult& r) -> std::optional<std::string> {
            (void)r;
            return std::nullopt;
          }};
}

inline Expectation expect_chain_valid() {
  return {"trace passes chain validation", [](const SimResult& r) -> std::optional<std::string> {
            if (r.report.chain.violations == 0) return std::nullopt;
            return std::to_string(r.report.chain.violations) + " violations";
          }};
}

inline Expectation expect_accounting() {
  return {"progress + lost + overhead + idle = workload", [](const SimResult& r) -> std::optional<std::string> {
            const auto& a = r.report.accounting;
            const double sum = a.progress + a.lost + a.overhead + a.idle;
            if (std::abs(sum - a.workload) <= 1e-9 * std::max(1.0, a.workload)) return std::nullopt;
            return "sum " + format_number(sum) + " vs " + format_number(a.workload);
          }};
}

}  // namespace detail

/// Structure kinds used by a scenario's solution.
inline std::set<std::string> structure_kinds(const Json& config) {
  std::set<std::string> out;
  for (const auto& inst : config.at("solution")) out.insert(inst.at("structure").get<std::string>());
  return out;
}

// ---------------------------------------------------------------------------

struct CrOptions {
  double failure_at_h = 25.0;
  double checkpoint_interval_h = 10.0;
  double heartbeat_h = 0.5;
  double horizon_h = 100.0;
  bool rollforward = false;
};

/// Heartbeat monitoring with checkpoint/rollback over the process state.
inline Scenario scenario_cr(const CrOptions& o = {}) {
  Scenario s;
  s.name = o.rollforward ? "cr-forward" : "cr";
  s.summary = "checkpoint/restart: heartbeat detection, rollback over persistent+dynamic state";
  Json proc{{"id", "proc"},
            {"scope", "application"},
            {"state", {{"persistent", 1.0}, {"dynamic", 1.0}}},
            {"fault_sources",
             Json::array({Json{{"classes", "active-transient-soft"},
                               {"dist", "scripted"},
                               {"params", {{"times", Json::array({o.failure_at_h})}}},
                               {"failure", "undetected-transient-complete"}}})}};
  Json ckpt{{"id", "ckpt"},
            {"structure", o.rollforward ? "rollforward" : "rollback"},
            {"domain", {{"components", Json::array({"proc"})}, {"aspects", Json::array({"persistent", "dynamic"})}}},
            {"params", {{"interval_h", o.checkpoint_interval_h}}}};
  if (o.rollforward) ckpt["params"]["journal"] = true;
  s.config = Json{
      {"system",
       {{"id", "node"}, {"compose", "serial"}, {"children", Json::array({proc, Json{{"id", "disk"}}})}}},
      {"edges", Json::array({Json{{"from", "node"}, {"to", "proc"}, {"semantics", "serial"}},
                             Json{{"from", "disk"}, {"to", "proc"}, {"semantics", "serial"}}})},
      {"workload", {{"rate", 1.0}}},
      {"solution",
       Json::array({Json{{"id", "heartbeat"},
                         {"structure", "monitoring"},
                         {"domain", {{"components", Json::array({"proc"})}, {"aspects", Json::array({"persistent", "dynamic"})}}},
                         {"params", {{"interval_h", o.heartbeat_h}}}},
                    ckpt})},
      {"sim", {{"horizon_h", o.horizon_h}, {"seed", 1}}}};
  s.detection_instance = "heartbeat";
  s.expectations = {detail::expect_complete(), detail::expect_chain_valid(), detail::expect_accounting(),
                    {"trace motif failure -> detect -> restore on proc",
                     [](const SimResult& r) -> std::optional<std::string> {
                       if (has_motif(r.trace, {RecordKind::failure, RecordKind::detect, RecordKind::restore}, "proc")) {
                         return std::nullopt;
                       }
                       return "motif missing";
                     }}};
  return s;
}

// ---------------------------------------------------------------------------

struct MigrationOptions {
  std::size_t nodes = 4;
  bool spare = true;
  double fault_rate = 0.002;  // per node-hour
  double lead_h = 4.0;        // sensor-to-failure lead
  double horizon_h = 500.0;
};

/// Thermal prediction feeding proactive migration.
inline Scenario scenario_migration(const MigrationOptions& o = {}) {
  Scenario s;
  s.name = o.spare ? "migration" : "migration-nospare";
  s.summary = "proactive migration: thermal prediction, restructure to spare or least-utilized node";
  Json nodes = Json::array();
  Json edges = Json::array();
  Json domain = Json::array();
  for (std::size_t i = 1; i <= o.nodes; ++i) {
    const std::string id = "n" + std::to_string(i);
    nodes.push_back(Json{{"id", id},
                         {"utilization", 0.5 + 0.1 * static_cast<double>(i)},
                         {"state", {{"environment", 1.0}}},
                         {"repair", {{"fixed_h", 8.0}}},
                         {"fault_sources",
                          Json::array({Json{{"classes", "active-permanent-hard"},
                                            {"dist", "exponential"},
                                            {"params", {{"rate", o.fault_rate}}},
                                            {"failure", "detected-permanent-complete"},
                                            {"precursor",
                                             {{"lead_h", o.lead_h}, {"baseline", 45.0}, {"peak", 95.0}, {"noise", 0.5}}}}})}});
    nodes.push_back(Json{{"id", "p" + std::to_string(i)}, {"scope", "application"}});
    edges.push_back(Json{{"from", id}, {"to", "p" + std::to_string(i)}, {"semantics", "serial"}});
    domain.push_back(id);
  }
  if (o.spare) {
    nodes.push_back(Json{{"id", "spare"}, {"spare", true}, {"state", {{"environment", 1.0}}}});
    domain.push_back("spare");
  }
  s.config = Json{
      {"system", {{"id", "cluster"}, {"compose", "redundant"}, {"children", nodes}}},
      {"edges", edges},
      {"workload", {{"rate", 1.0}}},
      {"solution",
       Json::array({Json{{"id", "thermal"},
                         {"structure", "prediction"},
                         {"domain", {{"components", domain}, {"aspects", Json::array({"environment"})}}},
                         {"params", {{"sample_interval_h", 0.5}, {"window", 4}, {"threshold", 80.0}, {"margin_h", 0.0}}}},
                    Json{{"id", "migrate"},
                         {"structure", "restructure"},
                         {"domain", {{"components", domain}, {"aspects", Json::array({"environment"})}}},
                         {"params", {{"action", "migrate"}, {"migration_cost_h", 0.1}}},
                         {"activation", {{"kinds", Json::array({"predict", "detect"})}}}}})},
      {"sim", {{"horizon_h", o.horizon_h}, {"seed", 1}}}};
  s.detection_instance = "thermal";
  s.expectations = {detail::expect_complete(), detail::expect_chain_valid(), detail::expect_accounting(),
                    {"every true prediction is followed by a migration",
                     [](const SimResult& r) -> std::optional<std::string> {
                       for (const auto* p : records_of(r.trace, RecordKind::predict)) {
                         if (p->cls != "true-positive") continue;
                         bool moved = false;
                         for (const auto& x : r.trace) {
                           if (x.kind == RecordKind::respond && x.cause == p->seq) moved = true;
                         }
                         if (!moved) return "prediction seq=" + std::to_string(p->seq) + " had no response";
                       }
                       return std::nullopt;
                     }}};
  return s;
}

// ---------------------------------------------------------------------------

struct CrosslayerOptions {
  double single_bit_rate = 0.05;  // per region-hour
  double double_bit_rate = 0.01;  // per region-hour
  double abft_failure_probability = 0.0;
  double horizon_h = 200.0;
};

/// Hardware SECDED, an OS relay mapping uncorrectable errors to the
/// application, and checksum-based matrix recovery in the library.
inline Scenario scenario_crosslayer(const CrosslayerOptions& o = {}) {
  Scenario s;
  s.name = "crosslayer";
  s.summary = "cross-layer: SECDED in memory, OS relay, ABFT checksum recovery of matrix A";
  auto sources = [&](double single, double dbl) {
    Json arr = Json::array();
    arr.push_back(Json{{"classes", "active-transient-soft"},
                       {"dist", "exponential"},
                       {"params", {{"rate", single}}},
                       {"failure", "detected-transient-complete"}});
    arr.push_back(Json{{"classes", "active-transient-soft"},
                       {"dist", "exponential"},
                       {"params", {{"rate", dbl}}},
                       {"failure", "detected-transient-complete"},
                       {"multiplicity", 2}});
    return arr;
  };
  Json children = Json::array(
      {Json{{"id", "dram"}},
       Json{{"id", "app"}, {"scope", "application"}, {"state", {{"persistent", 1.0}, {"dynamic", 1.0}}}},
       Json{{"id", "matA"},
            {"scope", "application"},
            {"app", "app"},
            {"weight", 0.0},
            {"state", {{"persistent", 1.0}}},
            {"fault_sources", sources(o.single_bit_rate, o.double_bit_rate)}},
       Json{{"id", "work"},
            {"scope", "application"},
            {"app", "app"},
            {"weight", 0.0},
            {"state", {{"dynamic", 1.0}}},
            {"fault_sources", sources(o.single_bit_rate, o.double_bit_rate)}}});
  s.config = Json{
      {"system", {{"id", "node"}, {"compose", "serial"}, {"children", children}}},
      {"edges", Json::array({Json{{"from", "matA"}, {"to", "app"}, {"semantics", "serial"}},
                             Json{{"from", "work"}, {"to", "app"}, {"semantics", "serial"}}})},
      {"workload", {{"rate", 1.0}}},
      {"solution",
       Json::array({Json{{"id", "ecc"},
                         {"structure", "nmr"},
                         {"domain", {{"components", Json::array({"matA", "work"})}, {"aspects", Json::array({"persistent", "dynamic"})}}},
                         {"params", {{"scheme", "secded"}}}},
                    Json{{"id", "relay"},
                         {"structure", "restructure"},
                         {"domain", {{"components", Json::array({"matA", "work"})}, {"aspects", Json::array({"persistent", "dynamic"})}}},
                         {"params", {{"action", "relay"}}},
                         {"activation", {{"kinds", Json::array({"detect"})}, {"sources", Json::array({"ecc"})}}},
                         {"role", Json::array({"containment"})}},
                    Json{{"id", "abft"},
                         {"structure", "nmr"},
                         {"domain", {{"components", Json::array({"matA"})}, {"aspects", Json::array({"persistent"})}}},
                         {"params",
                          {{"scheme", "checksum"}, {"cost_h", 0.05}, {"failure_probability", o.abft_failure_probability}}},
                         {"activation", {{"kinds", Json::array({"detect"})}, {"sources", Json::array({"relay"})}}},
                         {"role", Json::array({"mitigation"})}}})},
      {"sim", {{"horizon_h", o.horizon_h}, {"seed", 1}}}};
  s.detection_instance = "ecc";
  s.expectations = {detail::expect_complete(), detail::expect_chain_valid(), detail::expect_accounting(),
                    {"single-bit errors never reach the library",
                     [](const SimResult& r) -> std::optional<std::string> {
                       for (const auto& x : r.trace) {
                         if (x.kind != RecordKind::error || note_value(x.note, "bits") != "1") continue;
                         for (const auto& y : r.trace) {
                           if (y.cause == x.seq && y.kind == RecordKind::respond) return "library acted on seq " + std::to_string(x.seq);
                         }
                       }
                       return std::nullopt;
                     }},
                    {"matrix A DUEs are relayed to the checksum recovery",
                     [](const SimResult& r) -> std::optional<std::string> {
                       for (const auto& x : r.trace) {
                         if (x.kind == RecordKind::error && x.comp == "matA" && note_value(x.note, "verdict") == "uncorrectable") {
                           if (!has_motif(std::vector<TraceRecord>(r.trace.begin() + static_cast<long>(x.seq), r.trace.end()),
                                          {RecordKind::detect, RecordKind::respond, RecordKind::error}, "matA")) {
                             return "DUE seq=" + std::to_string(x.seq) + " not relayed";
                           }
                         }
                       }
                       return std::nullopt;
                     }}};
  return s;
}

// ---------------------------------------------------------------------------

struct DueAbortOptions {
  double fault_at_h = 50.0;
  double app_recovery_h = 2.0;
  double horizon_h = 100.0;
};

/// A double-bit error the hardware cannot correct aborts the application,
/// which restarts from its checkpoint while the system stays up.
inline Scenario scenario_due_abort(const DueAbortOptions& o = {}) {
  Scenario s;
  s.name = "due_abort";
  s.summary = "DUE-abort: application restarts from checkpoint, system keeps serving";
  s.config = Json{
      {"system",
       {{"id", "node"},
        {"compose", "serial"},
        {"children",
         Json::array({Json{{"id", "mem"}},
                      Json{{"id", "app"},
                           {"scope", "application"},
                           {"state", {{"persistent", 1.0}}},
                           {"fault_sources",
                            Json::array({Json{{"classes", "active-transient-soft"},
                                              {"dist", "scripted"},
                                              {"params", {{"times", Json::array({o.fault_at_h})}}},
                                              {"failure", "detected-transient-complete"},
                                              {"multiplicity", 2}}})}}})}}},
      {"edges", Json::array({Json{{"from", "mem"}, {"to", "app"}, {"semantics", "serial"}}})},
      {"workload", {{"rate", 1.0}}},
      {"solution",
       Json::array({Json{{"id", "ecc"},
                         {"structure", "nmr"},
                         {"domain", {{"components", Json::array({"app"})}, {"aspects", Json::array({"persistent"})}}},
                         {"params", {{"scheme", "secded"}}}},
                    Json{{"id", "ckpt"},
                         {"structure", "rollback"},
                         {"domain", {{"components", Json::array({"app"})}, {"aspects", Json::array({"persistent"})}}},
                         {"params", {{"interval_h", 10.0}, {"restore_cost_h", o.app_recovery_h}}}}})},
      {"sim", {{"horizon_h", o.horizon_h}, {"seed", 1}}}};
  s.detection_instance = "ecc";
  const double recovery = o.app_recovery_h;
  s.expectations = {detail::expect_complete(), detail::expect_chain_valid(), detail::expect_accounting(),
                    {"SMTTR = 0 and AMTTR = application recovery time",
                     [recovery](const SimResult& r) -> std::optional<std::string> {
                       const auto it = r.report.amttr_h.find("app");
                       if (r.report.smttr_h.value != 0.0) return "SMTTR " + format_number(r.report.smttr_h.value);
                       if (it == r.report.amttr_h.end()) return "no AMTTR for app";
                       if (it->second.value != recovery) return "AMTTR " + format_number(it->second.value);
                       return std::nullopt;
                     }}};
  return s;
}

// ---------------------------------------------------------------------------

struct DetectorOptions {
  double miss_rate = 0.1;
  double false_positive_rate = 0.2;
  double failure_rate = 0.1;  // per hour
  double horizon_h = 110000.0;
};

/// An imperfect heartbeat watching a frequently failing node; used to check
/// precision and recall against the configured detector quality.
inline Scenario scenario_detector(const DetectorOptions& o = {}) {
  Scenario s;
  s.name = "detector";
  s.summary = "imperfect heartbeat detector over a frequently failing node";
  s.config = Json{
      {"system",
       {{"id", "node"},
        {"state", {{"environment", 1.0}}},
        {"repair", {{"fixed_h", 0.0}}},
        {"fault_sources",
         Json::array({Json{{"classes", "active-transient-soft"},
                           {"dist", "exponential"},
                           {"params", {{"rate", o.failure_rate}}},
                           {"failure", "undetected-transient-complete"}}})}}},
      {"workload", {{"rate", 1.0}}},
      {"solution",
       Json::array({Json{{"id", "heartbeat"},
                         {"structure", "monitoring"},
                         {"domain", {{"components", Json::array({"node"})}, {"aspects", Json::array({"environment"})}}},
                         {"params",
                          {{"interval_h", 0.25},
                           {"miss_rate", o.miss_rate},
                           {"false_positive_rate", o.false_positive_rate}}}},
                    Json{{"id", "ckpt"},
                         {"structure", "rollback"},
                         {"domain", {{"components", Json::array({"node"})}, {"aspects", Json::array({"environment"})}}},
                         {"params", {{"interval_h", 5.0}, {"restore_cost_h", 0.1}}}}})},
      {"sim", {{"horizon_h", o.horizon_h}, {"seed", 1}}}};
  s.detection_instance = "heartbeat";
  s.expectations = {detail::expect_complete(), detail::expect_chain_valid(), detail::expect_accounting()};
  return s;
}

inline std::vector<Scenario> builtin_scenarios() {
  return {scenario_cr(), scenario_migration(), scenario_crosslayer(), scenario_due_abort(), scenario_detector()};
}

inline std::optional<Scenario> find_scenario(const std::string& name) {
  for (auto& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  if (name == "cr-forward") return scenario_cr(CrOptions{.rollforward = true});
  if (name == "migration-nospare") return scenario_migration(MigrationOptions{.spare = false});
  return std::nullopt;
}

}  // namespace resilsim
