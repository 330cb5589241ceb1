#pragma once

// Resilience design patterns: classification hierarchy, parameter schemas,
// pure pattern behaviors and the solution validator.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "resilsim/error.hpp"
#include "resilsim/json_util.hpp"
#include "resilsim/system_model.hpp"
#include "resilsim/taxonomy.hpp"

namespace resilsim {

enum class Strategy { fault_treatment, recovery, compensation };
enum class Architecture { fault_diagnosis, reconfiguration, checkpoint_recovery, state_diversity, design_diversity };
enum class Structure {
  monitoring,
  prediction,
  restructure,
  rejuvenation,
  reinitialization,
  rollback,
  rollforward,
  nmr,
  nversion,
  recovery_block,
};
enum class Capability { detection, containment, mitigation };

constexpr std::string_view to_string(Strategy v) {
  constexpr std::string_view n[] = {"fault_treatment", "recovery", "compensation"};
  return n[static_cast<int>(v)];
}
constexpr std::string_view to_string(Architecture v) {
  constexpr std::string_view n[] = {"fault_diagnosis", "reconfiguration", "checkpoint_recovery", "state_diversity",
                                    "design_diversity"};
  return n[static_cast<int>(v)];
}
constexpr std::string_view to_string(Structure v) {
  constexpr std::string_view n[] = {"monitoring", "prediction",  "restructure", "rejuvenation", "reinitialization",
                                    "rollback",   "rollforward", "nmr",         "nversion",     "recovery_block"};
  return n[static_cast<int>(v)];
}
constexpr std::string_view to_string(Capability v) {
  constexpr std::string_view n[] = {"detection", "containment", "mitigation"};
  return n[static_cast<int>(v)];
}

inline constexpr std::size_t kStrategyCount = 3;
inline constexpr std::size_t kArchitectureCount = 5;
inline constexpr std::size_t kStructureCount = 10;

constexpr Architecture architecture_of(Structure s) {
  switch (s) {
    case Structure::monitoring:
    case Structure::prediction: return Architecture::fault_diagnosis;
    case Structure::restructure:
    case Structure::rejuvenation:
    case Structure::reinitialization: return Architecture::reconfiguration;
    case Structure::rollback:
    case Structure::rollforward: return Architecture::checkpoint_recovery;
    case Structure::nmr: return Architecture::state_diversity;
    case Structure::nversion:
    case Structure::recovery_block: return Architecture::design_diversity;
  }
  return Architecture::fault_diagnosis;
}

constexpr Strategy strategy_of(Architecture a) {
  switch (a) {
    case Architecture::fault_diagnosis: return Strategy::fault_treatment;
    case Architecture::reconfiguration:
    case Architecture::checkpoint_recovery: return Strategy::recovery;
    case Architecture::state_diversity:
    case Architecture::design_diversity: return Strategy::compensation;
  }
  return Strategy::fault_treatment;
}

using CapabilitySet = std::set<Capability>;

inline const CapabilitySet& all_capabilities() {
  static const CapabilitySet all{Capability::detection, Capability::containment, Capability::mitigation};
  return all;
}

// ---------------------------------------------------------------------------
// Parameter schemas

enum class ParamType { number, integer, boolean, text, numbers };

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::number;
  Json fallback;  // null = required unless `optional_param`
  std::string description;
  std::optional<double> min;
  std::optional<double> max;
  std::vector<std::string> choices;
  bool optional_param = false;
};

struct CatalogEntry {
  Structure structure;
  std::string capabilities;  // human-readable capability rule
  std::vector<ParamSpec> params;
  std::vector<std::string> notes;
  std::set<std::string> default_activation;
};

namespace detail {

inline ParamSpec num(std::string name, double fallback, std::string desc, std::optional<double> lo = 0.0,
                     std::optional<double> hi = std::nullopt) {
  return {std::move(name), ParamType::number, fallback, std::move(desc), lo, hi, {}, false};
}
inline ParamSpec integer(std::string name, double fallback, std::string desc, double lo) {
  return {std::move(name), ParamType::integer, fallback, std::move(desc), lo, std::nullopt, {}, false};
}
inline ParamSpec flag(std::string name, bool fallback, std::string desc) {
  return {std::move(name), ParamType::boolean, fallback, std::move(desc), std::nullopt, std::nullopt, {}, false};
}
inline ParamSpec choice(std::string name, std::string fallback, std::vector<std::string> choices, std::string desc) {
  return {std::move(name), ParamType::text, fallback, std::move(desc), std::nullopt, std::nullopt, std::move(choices),
          false};
}
inline ParamSpec probability(std::string name, std::string desc) { return num(std::move(name), 0.0, std::move(desc), 0.0, 1.0); }

inline std::vector<CatalogEntry> build_catalog() {
  std::vector<CatalogEntry> c;
  c.push_back({Structure::monitoring,
               "detection",
               {num("interval_h", 1.0, "heartbeat interval (h)", 1e-12),
                {"latency_h", ParamType::number, nullptr, "detection latency (h); defaults to interval_h", 0.0,
                 std::nullopt, {}, true},
                probability("miss_rate", "probability a heartbeat check misses a failed component"),
                num("false_positive_rate", 0.0, "fraction of indications that are false alarms", 0.0, 0.999999),
                num("lo", -1e300, "lower bound of the acceptable range", std::nullopt),
                num("hi", 1e300, "upper bound of the acceptable range", std::nullopt),
                flag("suppress_on_diagnosis", false, "disable a permanent fault's source once diagnosed")},
               {},
               {"failure"}});
  c.push_back({Structure::prediction,
               "detection",
               {num("sample_interval_h", 1.0, "sensor sampling interval (h)", 1e-12),
                integer("window", 5, "samples in the trend window", 2),
                num("threshold", 1.0, "sensor value that indicates an imminent fault", std::nullopt),
                num("margin_h", 0.0, "extrapolation margin (h); also the reported lead time")},
               {"trend statistic: least-squares line over the window, extrapolated by margin_h"},
               {}});
  c.push_back({Structure::restructure,
               "containment, mitigation",
               {choice("action", "isolate", {"isolate", "migrate", "relay"},
                       "isolate the affected component, migrate its dependents, or relay the event upward"),
                num("migration_cost_h", 0.0, "cost of moving one dependent (h)")},
               {"migration prefers a spare component, otherwise the lowest-utilization sibling"},
               {"detect", "predict"}});
  c.push_back({Structure::rejuvenation,
               "containment, mitigation",
               {num("cost_h", 0.0, "identify and restore cost (h)")},
               {"refuses permanent events"},
               {"detect"}});
  c.push_back({Structure::reinitialization,
               "mitigation",
               {num("reboot_h", 0.0, "reboot cost (h)")},
               {"resets progress of the scope to its initial state"},
               {"detect"}});
  const std::vector<ParamSpec> ckpt{num("interval_h", 10.0, "checkpoint interval (h)", 1e-12),
                                    num("write_cost_h", 0.0, "fixed checkpoint write time (h)"),
                                    num("size_cost_h", 0.0, "write time per protected state unit (h)"),
                                    num("restore_cost_h", 0.0, "restore time (h)")};
  c.push_back({Structure::rollback, "containment, mitigation", ckpt, {"requires external detection"}, {"detect"}});
  auto fwd = ckpt;
  fwd.push_back(num("rederive_h", 0.0, "re-derivation cost after restore (h)"));
  fwd.push_back(flag("journal", true, "journal covers the interval since the last checkpoint"));
  c.push_back({Structure::rollforward, "containment, mitigation", fwd, {"requires external detection"}, {"detect"}});
  c.push_back({Structure::nmr,
               "N=2: detection; odd N>=3: detection, containment, mitigation; secded, checksum: detection, mitigation",
               {integer("replicas", 3, "replica count N (2N+1 replicas tolerate N fail-stop losses)", 1),
                choice("scheme", "replica", {"replica", "secded", "checksum"}, "redundancy scheme"),
                choice("mode", "hot", {"hot", "warm", "cold"}, "replica readiness"),
                num("warm_start_h", 0.0, "failover latency of a warm replica (h)"),
                num("cold_start_h", 0.0, "failover latency of a cold replica (h)"),
                num("tolerance", 0.0, "vote equality tolerance"),
                num("cost_h", 0.0, "correction cost (h)"),
                probability("failure_probability", "probability a checksum correction fails")},
               {"2N+1 rule: tolerating N fail-stop replica losses requires 2N+1 replicas",
                "even N>2 runs comparison-only"},
               {"error"}});
  c.push_back({Structure::nversion,
               "N=2: detection; odd N>=3: detection, containment, mitigation",
               {integer("variants", 3, "number of design variants", 2),
                probability("correlation", "probability a design fault is common to all variants"),
                {"latencies_h", ParamType::numbers, Json::array(), "per-variant latencies (h)", 0.0, std::nullopt, {},
                 false},
                num("tolerance", 0.0, "vote equality tolerance")},
               {"synchronization overhead = max latency - min latency"},
               {"error"}});
  c.push_back({Structure::recovery_block,
               "detection, containment, mitigation",
               {integer("alternates", 1, "alternate variants after the primary", 0),
                num("acceptance_coverage", 1.0, "probability the acceptance test rejects a bad output", 0.0, 1.0),
                probability("alternate_failure_probability", "probability an alternate also fails"),
                num("variant_cost_h", 0.0, "cost per executed variant (h)")},
               {"variants execute one at a time"},
               {"error"}});
  return c;
}

}  // namespace detail

inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> c = detail::build_catalog();
  return c;
}

inline const CatalogEntry& catalog_entry(Structure s) { return catalog().at(static_cast<std::size_t>(s)); }

/// Checks params against the schema and fills defaults.
inline Json normalize_params(Structure s, const Json& params, const std::string& path) {
  using namespace json_util;
  const auto& entry = catalog_entry(s);
  if (!params.is_null() && !params.is_object()) throw SchemaError(path, "expected an object");
  const Json in = params.is_null() ? Json::object() : params;
  for (auto it = in.begin(); it != in.end(); ++it) {
    const bool known = std::any_of(entry.params.begin(), entry.params.end(),
                                   [&](const ParamSpec& p) { return p.name == it.key(); });
    if (!known) throw SchemaError(join(path, it.key()), "unknown parameter for " + std::string(to_string(s)));
  }
  Json out = Json::object();
  for (const auto& spec : entry.params) {
    const std::string p = join(path, spec.name);
    if (!in.contains(spec.name)) {
      if (!spec.fallback.is_null()) out[spec.name] = spec.fallback;
      else if (!spec.optional_param) throw SchemaError(p, "required parameter");
      continue;
    }
    const Json& v = in[spec.name];
    auto check_range = [&](double x) {
      if (spec.min && x < *spec.min) throw SchemaError(p, "below minimum");
      if (spec.max && x > *spec.max) throw SchemaError(p, "above maximum");
    };
    switch (spec.type) {
      case ParamType::number: {
        const double x = number(v, p);
        check_range(x);
        out[spec.name] = x;
        break;
      }
      case ParamType::integer: {
        const double x = number(v, p);
        if (x != std::floor(x)) throw SchemaError(p, "expected an integer");
        check_range(x);
        out[spec.name] = static_cast<long long>(x);
        break;
      }
      case ParamType::boolean:
        if (!v.is_boolean()) throw SchemaError(p, "expected a boolean");
        out[spec.name] = v;
        break;
      case ParamType::text: {
        const std::string x = string(v, p);
        if (!spec.choices.empty() && std::find(spec.choices.begin(), spec.choices.end(), x) == spec.choices.end()) {
          throw SchemaError(p, "unknown value '" + x + "'");
        }
        out[spec.name] = x;
        break;
      }
      case ParamType::numbers: {
        Json arr = Json::array();
        const auto& a = array(v, p);
        for (std::size_t i = 0; i < a.size(); ++i) {
          const double x = number(a[i], join(p, i));
          check_range(x);
          arr.push_back(x);
        }
        out[spec.name] = arr;
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Instances and solutions

struct Activation {
  std::set<std::string> kinds;    // fault, error, failure, detect, predict
  std::set<std::string> sources;  // instance ids (or "self") whose signals match; empty = any
  friend bool operator==(const Activation&, const Activation&) = default;
};

struct PatternInstance {
  std::string id;
  Structure structure = Structure::monitoring;
  std::optional<Strategy> strategy;
  std::optional<Architecture> architecture;
  ProtectionDomain domain;
  Json params = Json::object();
  Activation activation;
  std::optional<CapabilitySet> role;

  double num(const std::string& key) const { return params.at(key).get<double>(); }
  long long integer(const std::string& key) const { return params.at(key).get<long long>(); }
  bool flag(const std::string& key) const { return params.at(key).get<bool>(); }
  std::string text(const std::string& key) const { return params.at(key).get<std::string>(); }
  bool has(const std::string& key) const { return params.contains(key); }
  bool covers(const std::string& component) const { return domain.components.count(component) > 0; }

  friend bool operator==(const PatternInstance&, const PatternInstance&) = default;
};

using ResilienceSolution = std::vector<PatternInstance>;

/// Catalog capabilities of an instance's structure, before role narrowing.
inline CapabilitySet kind_capabilities(const PatternInstance& inst) {
  using C = Capability;
  switch (inst.structure) {
    case Structure::monitoring:
    case Structure::prediction: return {C::detection};
    case Structure::restructure:
    case Structure::rejuvenation:
    case Structure::rollback:
    case Structure::rollforward: return {C::containment, C::mitigation};
    case Structure::reinitialization: return {C::mitigation};
    case Structure::nmr: {
      const auto scheme = inst.has("scheme") ? inst.text("scheme") : "replica";
      if (scheme != "replica") return {C::detection, C::mitigation};
      const long long n = inst.has("replicas") ? inst.integer("replicas") : 3;
      if (n >= 3 && n % 2 == 1) return all_capabilities();
      if (n >= 2) return {C::detection};
      return {};
    }
    case Structure::nversion: {
      const long long n = inst.has("variants") ? inst.integer("variants") : 3;
      if (n >= 3 && n % 2 == 1) return all_capabilities();
      return {C::detection};
    }
    case Structure::recovery_block: return all_capabilities();
  }
  return {};
}

/// Derived capabilities: the structure's capabilities narrowed by the role.
inline CapabilitySet capabilities(const PatternInstance& inst) {
  CapabilitySet caps = kind_capabilities(inst);
  if (!inst.role) return caps;
  CapabilitySet out;
  for (auto c : caps) {
    if (inst.role->count(c)) out.insert(c);
  }
  return out;
}

inline CapabilitySet capabilities(const ResilienceSolution& solution) {
  CapabilitySet caps;
  for (const auto& inst : solution) {
    auto c = capabilities(inst);
    caps.insert(c.begin(), c.end());
  }
  return caps;
}

inline std::string join_capabilities(const CapabilitySet& caps) {
  std::string out;
  for (auto c : caps) {
    if (!out.empty()) out += ", ";
    out += to_string(c);
  }
  return out;
}

inline PatternInstance parse_instance(const Json& j, const std::string& path) {
  using namespace json_util;
  only_keys(j, {"id", "structure", "strategy", "architecture", "domain", "params", "activation", "role"}, path);
  PatternInstance inst;
  inst.id = string(require(j, "id", path), join(path, "id"));
  if (inst.id.empty() || inst.id == "self" || inst.id.find_first_of(" \t=") != std::string::npos) {
    throw SchemaError(join(path, "id"), "instance ids must be non-empty, not 'self', and contain no spaces or '='");
  }
  inst.structure = enum_field<Structure, kStructureCount>(require(j, "structure", path), join(path, "structure"));
  if (const Json* s = optional(j, "strategy", path)) {
    inst.strategy = enum_field<Strategy, kStrategyCount>(*s, join(path, "strategy"));
  }
  if (const Json* a = optional(j, "architecture", path)) {
    inst.architecture = enum_field<Architecture, kArchitectureCount>(*a, join(path, "architecture"));
  }
  inst.domain = parse_domain(require(j, "domain", path), join(path, "domain"));
  const Json* params = optional(j, "params", path);
  inst.params = normalize_params(inst.structure, params ? *params : Json(), join(path, "params"));
  const auto& entry = catalog_entry(inst.structure);
  inst.activation.kinds = entry.default_activation;
  if (inst.structure == Structure::nmr && inst.text("scheme") == "checksum") inst.activation.kinds = {"detect"};
  if (const Json* act = optional(j, "activation", path)) {
    const std::string ap = join(path, "activation");
    only_keys(*act, {"kinds", "sources"}, ap);
    if (const Json* k = optional(*act, "kinds", ap)) {
      inst.activation.kinds.clear();
      for (const auto& kind : strings(*k, join(ap, "kinds"))) {
        static const std::set<std::string> allowed{"fault", "error", "failure", "detect", "predict"};
        if (!allowed.count(kind)) throw SchemaError(join(ap, "kinds"), "unknown activation kind '" + kind + "'");
        inst.activation.kinds.insert(kind);
      }
    }
    if (const Json* s = optional(*act, "sources", ap)) {
      for (const auto& src : strings(*s, join(ap, "sources"))) inst.activation.sources.insert(src);
    }
  }
  if (const Json* r = optional(j, "role", path)) {
    CapabilitySet role;
    const auto& arr = array(*r, join(path, "role"));
    for (std::size_t i = 0; i < arr.size(); ++i) {
      role.insert(enum_field<Capability, 3>(arr[i], join(join(path, "role"), i)));
    }
    inst.role = role;
  }
  return inst;
}

inline Json instance_to_json(const PatternInstance& inst) {
  Json j;
  j["id"] = inst.id;
  j["structure"] = to_string(inst.structure);
  if (inst.strategy) j["strategy"] = to_string(*inst.strategy);
  if (inst.architecture) j["architecture"] = to_string(*inst.architecture);
  j["domain"] = domain_to_json(inst.domain);
  j["params"] = inst.params;
  j["activation"] = {{"kinds", inst.activation.kinds}, {"sources", inst.activation.sources}};
  if (inst.role) {
    j["role"] = Json::array();
    for (auto c : *inst.role) j["role"].push_back(std::string(to_string(c)));
  }
  return j;
}

inline ResilienceSolution parse_solution(const Json& j, const std::string& path) {
  using namespace json_util;
  ResilienceSolution s;
  std::set<std::string> ids;
  const auto& arr = array(j, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    auto inst = parse_instance(arr[i], join(path, i));
    if (!ids.insert(inst.id).second) throw SchemaError(join(join(path, i), "id"), "duplicate instance id");
    s.push_back(std::move(inst));
  }
  return s;
}

inline Json solution_to_json(const ResilienceSolution& s) {
  Json arr = Json::array();
  for (const auto& inst : s) arr.push_back(instance_to_json(inst));
  return arr;
}

// ---------------------------------------------------------------------------
// Fault diagnosis behaviors

struct Observation {
  std::string component;
  std::string name;
  double value = 0.0;
};

struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
};

struct DetectionSignal {
  std::string component;
  std::string observed;
  double value = 0.0;
};

/// Emits a detection when the observation leaves the acceptable range.
inline std::optional<DetectionSignal> monitoring_check(const Observation& obs, const Bounds& bounds) {
  if (bounds.lo > bounds.hi) throw Error(ErrorCode::InvalidArgument, "bounds.lo > bounds.hi");
  if (obs.value >= bounds.lo && obs.value <= bounds.hi) return std::nullopt;
  return DetectionSignal{obs.component, obs.name, obs.value};
}

struct Sample {
  double t = 0.0;
  double value = 0.0;
};

struct Prediction {
  std::string component;
  double issued_at = 0.0;
  double predicted_time = 0.0;  // issued_at + lead
  double lead_h = 0.0;
  double crossing_time = 0.0;   // extrapolated threshold crossing
  double slope = 0.0;
};

/// Least-squares trend over the last `window` samples; predicts when the
/// line reaches `threshold` within `margin_h` of the newest sample.
inline std::optional<Prediction> prediction_forecast(const std::string& component, std::span<const Sample> history,
                                                     double threshold, double margin_h, std::size_t window = 0) {
  if (history.size() < 2) throw Error(ErrorCode::InsufficientHistory, "a trend needs at least 2 samples");
  if (margin_h < 0.0) throw Error(ErrorCode::InvalidArgument, "margin must be >= 0");
  const std::size_t n = (window == 0 || window > history.size()) ? history.size() : window;
  if (n < 2) throw Error(ErrorCode::InsufficientHistory, "a trend needs at least 2 samples");
  const auto recent = history.subspan(history.size() - n);
  double mt = 0.0, mv = 0.0;
  for (const auto& s : recent) {
    mt += s.t;
    mv += s.value;
  }
  mt /= static_cast<double>(n);
  mv /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (const auto& s : recent) {
    sxy += (s.t - mt) * (s.value - mv);
    sxx += (s.t - mt) * (s.t - mt);
  }
  if (sxx == 0.0) throw Error(ErrorCode::InsufficientHistory, "samples share one timestamp");
  const double slope = sxy / sxx;
  const double t_last = recent.back().t;
  const double at_horizon = mv + slope * (t_last + margin_h - mt);
  if (at_horizon < threshold) return std::nullopt;
  double crossing = t_last;
  if (slope > 0.0) crossing = std::max(mt + (threshold - mv) / slope, recent.front().t);
  return Prediction{component, t_last, t_last + margin_h, margin_h, crossing, slope};
}

// ---------------------------------------------------------------------------
// Checkpoint recovery

struct Checkpoint {
  std::uint64_t id = 0;
  double time = 0.0;
  std::string domain;
  double progress_units = 0.0;
  double storage_cost = 0.0;  // state units written
  double restore_cost_h = 0.0;
  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

class CheckpointStore {
 public:
  CheckpointStore() = default;
  explicit CheckpointStore(std::string domain) : domain_(std::move(domain)) {}

  const std::string& domain() const { return domain_; }
  const std::vector<Checkpoint>& checkpoints() const { return items_; }
  bool empty() const { return items_.empty(); }

  /// Latest checkpoint taken at or before `t`.
  const Checkpoint* latest_at(double t) const {
    const Checkpoint* best = nullptr;
    for (const auto& c : items_) {
      if (c.time <= t) best = &c;
    }
    return best;
  }

  void discard_after(double t) {
    items_.erase(std::remove_if(items_.begin(), items_.end(), [t](const Checkpoint& c) { return c.time > t; }),
                 items_.end());
  }

 private:
  friend Checkpoint checkpoint_create(CheckpointStore&, double, double, double, double);
  std::string domain_;
  std::vector<Checkpoint> items_;
};

/// Appends a snapshot of the domain's progress at time `t`.
inline Checkpoint checkpoint_create(CheckpointStore& store, double t, double progress_units, double storage_cost = 0.0,
                                    double restore_cost_h = 0.0) {
  if (t < 0.0) throw Error(ErrorCode::NegativeTime, "checkpoint time must be >= 0");
  if (!store.items_.empty()) {
    const auto& last = store.items_.back();
    if (t < last.time) throw Error(ErrorCode::InvariantViolation, "checkpoints must be taken in time order");
    if (progress_units < last.progress_units) {
      throw Error(ErrorCode::InvariantViolation, "checkpoint progress must be non-decreasing");
    }
  }
  Checkpoint c{store.items_.size() + 1, t, store.domain_, progress_units, storage_cost, restore_cost_h};
  store.items_.push_back(c);
  return c;
}

struct RollbackResult {
  double restored_time = 0.0;
  double restored_progress = 0.0;
  double lost_hours = 0.0;
  std::optional<std::uint64_t> checkpoint;
  bool from_start = false;  // no usable checkpoint: restored to start-up
};

/// Backward recovery to the latest checkpoint at or before the failure.
inline RollbackResult rollback_recover(const CheckpointStore& store, double failure_time) {
  if (failure_time < 0.0) throw Error(ErrorCode::NegativeTime, "failure time must be >= 0");
  const Checkpoint* c = store.latest_at(failure_time);
  if (!c) return {0.0, 0.0, failure_time, std::nullopt, true};
  return {c->time, c->progress_units, failure_time - c->time, c->id, false};
}

struct Journal {
  double from = 0.0;
  double to = 0.0;
};

struct RollforwardResult {
  double restored_time = 0.0;
  double restored_progress = 0.0;
  double lost_hours = 0.0;
  double recovery_cost_h = 0.0;
  bool fell_back = false;  // journal gap: rollback semantics applied
  RollbackResult rollback;
};

/// Forward recovery: restore the checkpoint, then replay the journal up to
/// the failure point. Gaps fall back to rollback.
inline RollforwardResult rollforward_recover(const CheckpointStore& store, const std::optional<Journal>& journal,
                                             double failure_time, double progress_at_failure, double rederive_h) {
  if (rederive_h < 0.0) throw Error(ErrorCode::InvalidArgument, "re-derivation cost must be >= 0");
  const RollbackResult rb = rollback_recover(store, failure_time);
  if (progress_at_failure < rb.restored_progress) {
    throw Error(ErrorCode::InvariantViolation, "progress at failure precedes the checkpoint");
  }
  const bool covers = journal && journal->from <= rb.restored_time && journal->to >= failure_time;
  if (!covers) return {rb.restored_time, rb.restored_progress, rb.lost_hours, 0.0, true, rb};
  return {failure_time, progress_at_failure, 0.0, rederive_h, false, rb};
}

// ---------------------------------------------------------------------------
// Redundancy and voting

enum class Verdict { agreed, corrected, uncorrectable };

constexpr std::string_view to_string(Verdict v) {
  constexpr std::string_view n[] = {"agreed", "corrected", "uncorrectable"};
  return n[static_cast<int>(v)];
}

template <typename T>
struct VoteResult {
  std::optional<T> output;
  Verdict verdict = Verdict::uncorrectable;
  std::size_t agreeing = 0;
  bool comparison_only = false;
  bool warning = false;  // even N > 2 was downgraded to comparison
};

namespace detail {

template <typename T>
bool same(const T& a, const T& b, double tolerance) {
  if constexpr (std::is_arithmetic_v<T>) {
    return tolerance > 0.0 ? std::fabs(static_cast<double>(a) - static_cast<double>(b)) <= tolerance : a == b;
  } else {
    (void)tolerance;
    return a == b;
  }
}

}  // namespace detail

/// Votes over N replica outputs; nullopt marks a fail-stop replica.
/// N=1 passes through (simplex), N=2 compares, odd N>=3 takes a strict
/// majority of all N slots, even N>2 falls back to comparison.
template <typename T>
VoteResult<T> nmr_execute(std::span<const std::optional<T>> outputs, double tolerance = 0.0) {
  const std::size_t n = outputs.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "no replica outputs");
  if (tolerance < 0.0) throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
  VoteResult<T> r;
  if (n == 1) {
    r.output = outputs[0];
    r.agreeing = outputs[0] ? 1 : 0;
    r.verdict = outputs[0] ? Verdict::agreed : Verdict::uncorrectable;
    return r;
  }
  if (n % 2 == 0) {
    r.comparison_only = true;
    r.warning = n > 2;
    const bool all_present = std::all_of(outputs.begin(), outputs.end(), [](const auto& o) { return o.has_value(); });
    bool all_equal = all_present;
    for (std::size_t i = 1; all_equal && i < n; ++i) all_equal = detail::same(*outputs[0], *outputs[i], tolerance);
    if (all_equal) {
      r.output = outputs[0];
      r.agreeing = n;
      r.verdict = Verdict::agreed;
    }
    return r;
  }
  std::optional<std::size_t> best;
  std::size_t best_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!outputs[i]) continue;
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (outputs[j] && detail::same(*outputs[i], *outputs[j], tolerance)) ++count;
    }
    bool better = count > best_count;
    if constexpr (std::totally_ordered<T>) {
      better = better || (best && count == best_count && *outputs[i] < *outputs[*best]);
    }
    if (better) {
      best = i;
      best_count = count;
    }
  }
  if (best && 2 * best_count > n) {
    r.output = outputs[*best];
    r.agreeing = best_count;
    r.verdict = best_count == n ? Verdict::agreed : Verdict::corrected;
  }
  return r;
}

template <typename T>
VoteResult<T> nmr_execute(const std::vector<std::optional<T>>& outputs, double tolerance = 0.0) {
  return nmr_execute<T>(std::span<const std::optional<T>>(outputs), tolerance);
}

template <typename T>
VoteResult<T> nmr_execute(const std::vector<T>& outputs, double tolerance = 0.0) {
  std::vector<std::optional<T>> wrapped(outputs.begin(), outputs.end());
  return nmr_execute<T>(std::span<const std::optional<T>>(wrapped), tolerance);
}

/// Replicas needed to outvote `failures` fail-stop losses.
constexpr std::size_t required_replicas(std::size_t failures) { return 2 * failures + 1; }

template <typename T>
struct VariantOutput {
  std::optional<T> value;
  double latency_h = 0.0;
};

template <typename T>
struct NVersionResult {
  VoteResult<T> vote;
  double sync_overhead_h = 0.0;
};

template <typename T>
NVersionResult<T> nversion_execute(std::span<const VariantOutput<T>> variants, double tolerance = 0.0) {
  if (variants.size() < 2) throw Error(ErrorCode::InvalidArgument, "n-version design needs >= 2 variants");
  std::vector<std::optional<T>> outs;
  double lo = variants.front().latency_h, hi = lo;
  for (const auto& v : variants) {
    if (v.latency_h < 0.0) throw Error(ErrorCode::InvalidArgument, "latency must be >= 0");
    outs.push_back(v.value);
    lo = std::min(lo, v.latency_h);
    hi = std::max(hi, v.latency_h);
  }
  return {nmr_execute<T>(std::span<const std::optional<T>>(outs), tolerance), hi - lo};
}

template <typename T>
NVersionResult<T> nversion_execute(const std::vector<VariantOutput<T>>& variants, double tolerance = 0.0) {
  return nversion_execute<T>(std::span<const VariantOutput<T>>(variants), tolerance);
}

template <typename T>
struct RecoveryBlockResult {
  T output;
  std::size_t executions = 0;
  std::size_t accepted_index = 0;  // 0 = primary
  double cost_h = 0.0;
};

/// Runs variants one at a time until one passes the acceptance test.
/// variants[0] is the primary; costs (if given) accumulate per execution.
template <typename T>
RecoveryBlockResult<T> recovery_block(const std::vector<std::function<T()>>& variants,
                                      const std::function<bool(const T&)>& accept,
                                      const std::vector<double>& costs_h = {}) {
  if (variants.empty()) throw Error(ErrorCode::InvalidArgument, "recovery block needs at least one variant");
  double cost = 0.0;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    T out = variants[i]();
    if (i < costs_h.size()) cost += costs_h[i];
    if (accept(out)) return {std::move(out), i + 1, i, cost};
  }
  throw Error(ErrorCode::AllVariantsRejected,
              "all " + std::to_string(variants.size()) + " variants failed the acceptance test");
}

// ---------------------------------------------------------------------------
// Reconfiguration

struct RestructureResult {
  SystemModel model;
  double factor = 1.0;
  std::optional<std::string> target;     // migration destination
  std::vector<std::string> moved;        // consumers rewired to the target
  bool degraded = true;
};

/// Picks a migration destination: a spare first, else the sibling leaf with
/// the lowest utilization. Excluded and non-operational components never qualify.
inline std::optional<std::size_t> migration_target(const SystemModel& m, std::size_t affected) {
  auto usable = [&](std::size_t i) {
    const auto& c = m.at(i);
    return i != affected && c.leaf() && c.operational() && !m.excluded_or_under_excluded(i) &&
           c.clock.status == Status::service_delivery && c.scope == m.at(affected).scope;
  };
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.at(i).spare && usable(i)) return i;
  }
  const int parent = m.at(affected).parent;
  if (parent < 0) return std::nullopt;
  std::optional<std::size_t> best;
  for (auto i : m.at(static_cast<std::size_t>(parent)).children) {
    if (!usable(i) || m.at(i).spare) continue;
    if (!best || m.at(i).utilization < m.at(*best).utilization) best = i;
  }
  return best;
}

/// Isolates `affected`; with `migrate`, first rewires its consumers to a
/// migration target so they keep a provider.
inline RestructureResult restructure(const SystemModel& model, const std::string& affected, bool migrate = false) {
  const auto idx = model.index_of(affected);
  RestructureResult r;
  SystemModel next = model;
  if (migrate) {
    if (auto t = migration_target(model, idx)) {
      const auto target = model.at(*t).id;
      for (const auto* e : model.consumers_of(affected)) r.moved.push_back(e->consumer);
      for (const auto& consumer : r.moved) next.rewire_provider(consumer, affected, target);
      auto& tc = next.mutable_at(*t);
      tc.spare = false;
      tc.utilization += model.at(idx).utilization;
      r.target = target;
    }
  }
  auto d = degrade(next, affected);
  r.model = std::move(d.model);
  r.factor = d.factor;
  return r;
}

struct RejuvenateResult {
  std::vector<double> region;
  std::vector<std::size_t> restored;
  double cost_h = 0.0;
};

/// Restores only the corrupted elements of a data region by interpolating
/// their nearest intact neighbors.
inline RejuvenateResult rejuvenate(const std::vector<double>& region, const std::set<std::size_t>& corrupted,
                                   Persistence event_persistence, double cost_h = 0.0) {
  if (event_persistence == Persistence::permanent) {
    throw Error(ErrorCode::PersistentEvent, "rejuvenation cannot repair a permanent event");
  }
  for (auto i : corrupted) {
    if (i >= region.size()) throw Error(ErrorCode::InvalidArgument, "corrupted index outside the region");
  }
  RejuvenateResult r{region, {corrupted.begin(), corrupted.end()}, cost_h};
  for (auto i : corrupted) {
    std::optional<double> left, right;
    for (std::size_t j = i; j-- > 0;) {
      if (!corrupted.count(j)) {
        left = region[j];
        break;
      }
    }
    for (std::size_t j = i + 1; j < region.size(); ++j) {
      if (!corrupted.count(j)) {
        right = region[j];
        break;
      }
    }
    if (left && right) r.region[i] = 0.5 * (*left + *right);
    else if (left) r.region[i] = *left;
    else if (right) r.region[i] = *right;
    else r.region[i] = 0.0;
  }
  return r;
}

/// Resets progress of the components in `scope`; others are untouched.
inline std::map<std::string, double> reinitialize(const std::map<std::string, double>& progress,
                                                  const std::set<std::string>& scope) {
  auto out = progress;
  for (auto& [id, p] : out) {
    if (scope.count(id)) p = 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Detector quality model

struct DetectorModel {
  double miss_rate = 0.0;             // P(check misses an actual event)
  double false_positive_rate = 0.0;   // fraction of indications that are false

  double expected_precision() const { return 1.0 - false_positive_rate; }
  double expected_recall() const { return 1.0 - miss_rate; }
};

// ---------------------------------------------------------------------------
// Solution validation

struct AxisVerdict {
  std::string axis;
  bool pass = true;
  std::vector<std::string> gaps;
  std::vector<std::string> notes;
};

struct SolutionVerdict {
  bool complete = false;
  CapabilitySet capabilities;
  std::vector<Capability> missing;
  std::vector<AxisVerdict> axes;  // capability, fault_model, protection_domain, interfaces, implementation

  const AxisVerdict& axis(const std::string& name) const {
    for (const auto& a : axes) {
      if (a.axis == name) return a;
    }
    throw Error(ErrorCode::InvalidArgument, "no axis '" + name + "'");
  }
};

namespace detail {

inline bool is_detector(const PatternInstance& i) { return capabilities(i).count(Capability::detection) > 0; }

inline bool domains_overlap(const ProtectionDomain& a, const ProtectionDomain& b) {
  return std::any_of(a.components.begin(), a.components.end(), [&](const auto& c) { return b.components.count(c); });
}

inline bool activates_on(const PatternInstance& i, const std::string& component) {
  if (!i.covers(component)) return false;
  return !i.activation.kinds.empty() || i.structure == Structure::prediction;
}

}  // namespace detail

inline SolutionVerdict validate_solution(const ResilienceSolution& solution, const SystemModel& model) {
  SolutionVerdict v;
  v.capabilities = capabilities(solution);

  AxisVerdict cap{"capability", true, {}, {}};
  for (auto c : all_capabilities()) {
    if (!v.capabilities.count(c)) {
      v.missing.push_back(c);
      cap.gaps.push_back("missing: " + std::string(to_string(c)));
    }
  }
  cap.pass = v.missing.empty();
  cap.notes.push_back("provided: " + join_capabilities(v.capabilities));
  v.complete = cap.pass;

  AxisVerdict faults{"fault_model", true, {}, {}};
  for (const auto& c : model.components()) {
    if (!c.operational()) continue;
    for (std::size_t s = 0; s < c.fault_sources.size(); ++s) {
      const bool handled = std::any_of(solution.begin(), solution.end(),
                                       [&](const auto& i) { return detail::activates_on(i, c.id); });
      if (!handled) {
        faults.gaps.push_back(c.id + "/" + std::to_string(s) + " " + to_string(c.fault_sources[s].descriptor_template) +
                              ": no activating pattern");
      }
    }
  }
  faults.pass = faults.gaps.empty();

  AxisVerdict domain{"protection_domain", true, {}, {}};
  ProtectionDomain all;
  std::set<std::string> stateless_instances;
  for (const auto& inst : solution) {
    try {
      validate_domain(inst.domain, model);
    } catch (const Error& e) {
      domain.gaps.push_back(inst.id + ": " + e.what());
      continue;
    }
    all.components.insert(inst.domain.components.begin(), inst.domain.components.end());
    for (auto a : inst.domain.aspects) {
      if (a == StateAspect::stateless) stateless_instances.insert(inst.id);
      else all.aspects.insert(a);
    }
  }
  if (all.aspects.empty()) all.aspects.insert(StateAspect::stateless);
  {
    ProtectionDomain known;
    for (const auto& c : all.components) {
      if (model.find(c)) known.components.insert(c);
    }
    known.aspects = all.aspects;
    const auto cov = coverage(known, model);
    for (const auto& c : cov.uncovered_components) {
      const auto& comp = model.at(c);
      if (!comp.fault_sources.empty() || comp.weight > 0.0) domain.gaps.push_back("uncovered component: " + c);
    }
    for (auto a : cov.uncovered_aspects) domain.notes.push_back("uncovered aspect: " + std::string(to_string(a)));
    for (const auto& id : stateless_instances) domain.notes.push_back(id + ": stateless by design");
  }
  domain.pass = domain.gaps.empty();

  AxisVerdict iface{"interfaces", true, {}, {}};
  std::set<std::string> ids;
  for (const auto& inst : solution) ids.insert(inst.id);
  for (const auto& inst : solution) {
    const auto arch = architecture_of(inst.structure);
    if (inst.architecture && *inst.architecture != arch) {
      iface.gaps.push_back(inst.id + ": " + std::string(to_string(inst.structure)) + " belongs to " +
                           std::string(to_string(arch)) + ", not " + std::string(to_string(*inst.architecture)));
    }
    if (inst.strategy && *inst.strategy != strategy_of(arch)) {
      iface.gaps.push_back(inst.id + ": " + std::string(to_string(arch)) + " belongs to " +
                           std::string(to_string(strategy_of(arch))) + ", not " +
                           std::string(to_string(*inst.strategy)));
    }
    for (const auto& src : inst.activation.sources) {
      if (src != "self" && !ids.count(src)) iface.gaps.push_back(inst.id + ": activation source '" + src + "' unknown");
    }
    if (inst.structure == Structure::rollback || inst.structure == Structure::rollforward) {
      const bool detected = std::any_of(solution.begin(), solution.end(), [&](const auto& d) {
        return d.id != inst.id && detail::is_detector(d) && detail::domains_overlap(d.domain, inst.domain);
      });
      if (!detected) iface.gaps.push_back(inst.id + ": requires external detection");
    }
    if (inst.role) {
      for (auto c : *inst.role) {
        if (!kind_capabilities(inst).count(c)) {
          iface.notes.push_back(inst.id + ": role " + std::string(to_string(c)) + " not offered by " +
                                std::string(to_string(inst.structure)));
        }
      }
    }
  }
  iface.pass = iface.gaps.empty();

  AxisVerdict impl{"implementation", true, {}, {}};
  for (const auto& inst : solution) {
    if (inst.structure == Structure::nmr && inst.text("scheme") == "replica") {
      const auto n = inst.integer("replicas");
      if (n < 2) impl.gaps.push_back(inst.id + ": replicas must be >= 2");
      else if (n > 2 && n % 2 == 0) impl.notes.push_back(inst.id + ": even N>2 runs comparison-only");
    }
    if (inst.structure == Structure::restructure && inst.text("action") == "migrate") {
      bool spare = false;
      for (const auto& c : model.components()) spare = spare || c.spare;
      if (!spare) impl.notes.push_back(inst.id + ": no spare, migration uses the lowest-utilization sibling");
    }
  }
  impl.pass = impl.gaps.empty();

  v.axes = {cap, faults, domain, iface, impl};
  return v;
}

inline Json verdict_to_json(const SolutionVerdict& v) {
  Json j;
  j["complete"] = v.complete;
  j["capabilities"] = Json::array();
  for (auto c : v.capabilities) j["capabilities"].push_back(std::string(to_string(c)));
  j["missing"] = Json::array();
  for (auto c : v.missing) j["missing"].push_back(std::string(to_string(c)));
  j["axes"] = Json::array();
  for (const auto& a : v.axes) {
    j["axes"].push_back({{"axis", a.axis}, {"status", a.pass ? "pass" : "gap"}, {"gaps", a.gaps}, {"notes", a.notes}});
  }
  return j;
}

inline std::string verdict_to_text(const SolutionVerdict& v) {
  std::string out = std::string("solution: ") + (v.complete ? "complete" : "incomplete") + "\n";
  for (const auto& a : v.axes) {
    out += a.axis + ": " + (a.pass ? "pass" : "gap") + "\n";
    for (const auto& g : a.gaps) out += "  " + g + "\n";
    for (const auto& n : a.notes) out += "  note: " + n + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Catalog rendering

inline std::string catalog_text() {
  std::string out;
  for (std::size_t s = 0; s < kStrategyCount; ++s) {
    const auto strat = static_cast<Strategy>(s);
    out += std::string(to_string(strat)) + "\n";
    for (std::size_t a = 0; a < kArchitectureCount; ++a) {
      const auto arch = static_cast<Architecture>(a);
      if (strategy_of(arch) != strat) continue;
      out += "  " + std::string(to_string(arch)) + "\n";
      for (const auto& e : catalog()) {
        if (architecture_of(e.structure) != arch) continue;
        out += "    " + std::string(to_string(e.structure)) + "  [" + e.capabilities + "]\n";
        for (const auto& n : e.notes) out += "      note: " + n + "\n";
        for (const auto& p : e.params) {
          std::string dflt = p.fallback.is_null() ? "interval_h" : p.fallback.dump();
          out += "      " + p.name + " = " + dflt + "  " + p.description + "\n";
        }
      }
    }
  }
  return out;
}

inline Json catalog_json() {
  Json tree = Json::array();
  for (std::size_t s = 0; s < kStrategyCount; ++s) {
    const auto strat = static_cast<Strategy>(s);
    Json sj{{"strategy", to_string(strat)}, {"architectures", Json::array()}};
    for (std::size_t a = 0; a < kArchitectureCount; ++a) {
      const auto arch = static_cast<Architecture>(a);
      if (strategy_of(arch) != strat) continue;
      Json aj{{"architecture", to_string(arch)}, {"structures", Json::array()}};
      for (const auto& e : catalog()) {
        if (architecture_of(e.structure) != arch) continue;
        Json params = Json::array();
        for (const auto& p : e.params) {
          params.push_back({{"name", p.name}, {"default", p.fallback}, {"description", p.description}});
        }
        aj["structures"].push_back(
            {{"structure", to_string(e.structure)}, {"capabilities", e.capabilities}, {"notes", e.notes}, {"params", params}});
      }
      sj["architectures"].push_back(aj);
    }
    tree.push_back(sj);
  }
  return tree;
}

}  // namespace resilsim
