#pragma once

// The modeled HPC system: component tree, service dependencies, fault
// sources, repair models, operational status and protection domains.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "resilsim/error.hpp"
#include "resilsim/json_util.hpp"
#include "resilsim/metrics.hpp"
#include "resilsim/taxonomy.hpp"

namespace resilsim {

enum class Status { service_delivery, scheduled_outage, unscheduled_outage };
enum class Lifecycle { development, operational, retired };
enum class StateAspect { persistent, dynamic, environment, stateless };
enum class Scope { system, application };
enum class Composition { serial, redundant };

constexpr std::string_view to_string(Status v) {
  constexpr std::string_view n[] = {"service_delivery", "scheduled_outage", "unscheduled_outage"};
  return n[static_cast<int>(v)];
}
constexpr std::string_view to_string(Lifecycle v) {
  constexpr std::string_view n[] = {"development", "operational", "retired"};
  return n[static_cast<int>(v)];
}
constexpr std::string_view to_string(StateAspect v) {
  constexpr std::string_view n[] = {"persistent", "dynamic", "environment", "stateless"};
  return n[static_cast<int>(v)];
}
constexpr std::string_view to_string(Scope v) {
  constexpr std::string_view n[] = {"system", "application"};
  return n[static_cast<int>(v)];
}
constexpr std::string_view to_string(Composition v) {
  constexpr std::string_view n[] = {"serial", "redundant"};
  return n[static_cast<int>(v)];
}

/// Sensor ramp that precedes a fault, observable by prediction patterns.
struct Precursor {
  double lead_h = 0.0;     // ramp starts this long before the fault
  double baseline = 0.0;
  double peak = 0.0;       // reading at fault time
  double noise = 0.0;      // std-dev of additive sensor noise
  friend bool operator==(const Precursor&, const Precursor&) = default;
};

enum class ArrivalKind { none, distribution, scripted };

struct FaultSource {
  FaultDescriptor descriptor_template;
  ArrivalKind arrival = ArrivalKind::none;
  std::optional<LifetimeDistribution> interarrival;
  std::vector<double> scripted_times;
  std::optional<double> activation_delay_h;  // nullopt = immediate
  std::optional<double> recurrence_h;        // intermittent sources only
  FailureDescriptor failure{Detection::detected, Persistence::transient, Severity::complete};
  double mask_probability = 0.0;
  int multiplicity = 1;  // corrupted units (e.g. bits) per occurrence
  std::optional<Precursor> precursor;

  friend bool operator==(const FaultSource&, const FaultSource&) = default;
};

using RepairModel = std::variant<std::monostate, double, LifetimeDistribution>;

struct MaintenanceWindow {
  double start_h = 0.0;
  double duration_h = 0.0;
  friend bool operator==(const MaintenanceWindow&, const MaintenanceWindow&) = default;
};

struct StatusClock {
  Status status = Status::service_delivery;
  double since = 0.0;
  double t_pu = 0.0, t_ud = 0.0, t_sd = 0.0;
  friend bool operator==(const StatusClock&, const StatusClock&) = default;
};

struct Component {
  std::string id;
  std::string name;
  Scope scope = Scope::system;
  std::string app;  // application grouping for application-scope components
  Composition compose = Composition::serial;
  Lifecycle lifecycle = Lifecycle::operational;
  std::map<StateAspect, double> state_profile;
  RepairModel repair;
  std::vector<FaultSource> fault_sources;
  double weight = 0.0;
  double utilization = 0.0;
  bool spare = false;
  std::vector<MaintenanceWindow> maintenance;

  StatusClock clock;
  bool excluded = false;

  int parent = -1;
  std::vector<std::size_t> children;

  bool operational() const { return lifecycle == Lifecycle::operational; }
  bool leaf() const { return children.empty(); }

  friend bool operator==(const Component&, const Component&) = default;
};

struct ServiceEdge {
  std::string provider;
  std::string consumer;
  Composition semantics = Composition::serial;
  friend bool operator==(const ServiceEdge&, const ServiceEdge&) = default;
};

struct ProtectionDomain {
  std::set<std::string> components;
  std::set<StateAspect> aspects;
  friend bool operator==(const ProtectionDomain&, const ProtectionDomain&) = default;
};

/// Component tree stored in pre-order (index 0 is the root, the full
/// system) plus service edges. A value type: operations return new models.
class SystemModel {
 public:
  SystemModel() = default;

  const std::vector<Component>& components() const { return components_; }
  const std::vector<ServiceEdge>& edges() const { return edges_; }
  const Component& root() const { return components_.at(0); }
  std::size_t size() const { return components_.size(); }

  std::optional<std::size_t> find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(const std::string& id) const {
    auto i = find(id);
    if (!i) throw Error(ErrorCode::UnknownComponent, "no component '" + id + "'");
    return *i;
  }

  const Component& at(const std::string& id) const { return components_[index_of(id)]; }
  const Component& at(std::size_t i) const { return components_.at(i); }
  Component& mutable_at(std::size_t i) { return components_.at(i); }

  /// Leaves in the subtree rooted at `i`, pre-order.
  std::vector<std::size_t> leaves_under(std::size_t i) const {
    std::vector<std::size_t> out;
    collect_leaves(i, out);
    return out;
  }

  bool excluded_or_under_excluded(std::size_t i) const {
    for (int c = static_cast<int>(i); c >= 0; c = components_[c].parent) {
      if (components_[c].excluded) return true;
    }
    return false;
  }

  std::vector<const ServiceEdge*> consumers_of(const std::string& id) const {
    std::vector<const ServiceEdge*> out;
    for (const auto& e : edges_) {
      if (e.provider == id) out.push_back(&e);
    }
    return out;
  }

  std::vector<const ServiceEdge*> providers_of(const std::string& id) const {
    std::vector<const ServiceEdge*> out;
    for (const auto& e : edges_) {
      if (e.consumer == id) out.push_back(&e);
    }
    return out;
  }

  /// Adds a component under `parent` (or as root when the model is empty).
  std::size_t add_component(Component c, int parent) {
    if (index_.count(c.id)) throw Error(ErrorCode::InvalidArgument, "duplicate component id '" + c.id + "'");
    c.parent = parent;
    c.children.clear();
    const std::size_t idx = components_.size();
    index_[c.id] = idx;
    components_.push_back(std::move(c));
    if (parent >= 0) components_[parent].children.push_back(idx);
    return idx;
  }

  void add_edge(ServiceEdge e) { edges_.push_back(std::move(e)); }

  void rewire_provider(const std::string& consumer, const std::string& from, const std::string& to) {
    for (auto& e : edges_) {
      if (e.consumer == consumer && e.provider == from) e.provider = to;
    }
  }

  /// Accrues the time spent in the current status up to `t`, then switches.
  void apply_status(std::size_t i, Status s, double t) {
    auto& clk = components_.at(i).clock;
    accrue(clk, t);
    clk.status = s;
  }

  friend bool operator==(const SystemModel& a, const SystemModel& b) {
    return a.components_ == b.components_ && a.edges_ == b.edges_;
  }

  static void accrue(StatusClock& clk, double t) {
    if (t < clk.since) throw Error(ErrorCode::InvalidArgument, "status change goes back in time");
    const double dt = t - clk.since;
    switch (clk.status) {
      case Status::service_delivery: clk.t_pu += dt; break;
      case Status::unscheduled_outage: clk.t_ud += dt; break;
      case Status::scheduled_outage: clk.t_sd += dt; break;
    }
    clk.since = t;
  }

 private:
  void collect_leaves(std::size_t i, std::vector<std::size_t>& out) const {
    const auto& c = components_[i];
    if (c.leaf()) {
      out.push_back(i);
      return;
    }
    for (auto ch : c.children) collect_leaves(ch, out);
  }

  std::vector<Component> components_;
  std::vector<ServiceEdge> edges_;
  std::unordered_map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Status bookkeeping

inline SystemModel set_status(const SystemModel& model, const std::string& id, Status status, double t) {
  const auto i = model.index_of(id);
  const auto& c = model.at(i);
  if (c.lifecycle == Lifecycle::retired) throw Error(ErrorCode::RetiredComponent, "'" + id + "' is retired");
  if (c.lifecycle != Lifecycle::operational) {
    throw Error(ErrorCode::RetiredComponent, "'" + id + "' is not yet operational");
  }
  SystemModel next = model;
  next.apply_status(i, status, t);
  return next;
}

/// Status occupancy including the still-open interval up to `t`.
inline StatusClock status_times(const SystemModel& model, const std::string& id, double t) {
  StatusClock clk = model.at(id).clock;
  SystemModel::accrue(clk, t);
  return clk;
}

// ---------------------------------------------------------------------------
// Protection-domain coverage

struct CoverageSummary {
  std::vector<std::string> covered_components;
  std::vector<std::string> uncovered_components;
  std::vector<StateAspect> covered_aspects;
  std::vector<StateAspect> uncovered_aspects;
  double covered_state_units = 0.0;
  double total_state_units = 0.0;
  bool stateless = false;
};

inline void validate_domain(const ProtectionDomain& d, const SystemModel& model) {
  for (const auto& c : d.components) {
    if (!model.find(c)) throw Error(ErrorCode::UnknownComponent, "domain names unknown component '" + c + "'");
  }
  if (d.aspects.empty()) throw Error(ErrorCode::InvalidArgument, "domain needs at least one state aspect");
  if (d.aspects.count(StateAspect::stateless) && d.aspects.size() > 1) {
    throw Error(ErrorCode::InvalidArgument, "stateless cannot be fused with other state aspects");
  }
}

inline CoverageSummary coverage(const ProtectionDomain& domain, const SystemModel& model) {
  validate_domain(domain, model);
  CoverageSummary s;
  s.stateless = domain.aspects.count(StateAspect::stateless) > 0;
  for (const auto& c : model.components()) {
    if (!c.operational()) continue;
    double units = 0.0;
    for (const auto& [aspect, size] : c.state_profile) {
      if (aspect == StateAspect::stateless) continue;
      s.total_state_units += size;
      if (domain.components.count(c.id) && !s.stateless && domain.aspects.count(aspect)) units += size;
    }
    s.covered_state_units += units;
    (domain.components.count(c.id) ? s.covered_components : s.uncovered_components).push_back(c.id);
  }
  if (!s.stateless) {
    for (auto a : {StateAspect::persistent, StateAspect::dynamic, StateAspect::environment}) {
      (domain.aspects.count(a) ? s.covered_aspects : s.uncovered_aspects).push_back(a);
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Degraded operation

struct DegradeResult {
  SystemModel model;
  double factor = 1.0;  // surviving share of leaf capacity under the parent
};

namespace detail {

inline double capacity_factor(const SystemModel& m, std::size_t affected) {
  const auto& c = m.at(affected);
  const std::size_t scope = c.parent >= 0 ? static_cast<std::size_t>(c.parent) : affected;
  const auto leaves = m.leaves_under(scope);
  if (leaves.empty()) return 1.0;
  std::size_t alive = 0;
  for (auto l : leaves) alive += m.excluded_or_under_excluded(l) ? 0 : 1;
  return static_cast<double>(alive) / static_cast<double>(leaves.size());
}

}  // namespace detail

/// Excludes a component from service. Throws PartitionError when a consumer
/// would be left without any non-excluded provider.
inline DegradeResult degrade(const SystemModel& model, const std::string& id) {
  const auto i = model.index_of(id);
  if (model.at(i).excluded) return {model, detail::capacity_factor(model, i)};
  for (const auto* edge : model.consumers_of(id)) {
    bool alternative = false;
    for (const auto* p : model.providers_of(edge->consumer)) {
      if (p->provider == id) continue;
      if (!model.excluded_or_under_excluded(model.index_of(p->provider))) alternative = true;
    }
    if (!alternative) {
      throw Error(ErrorCode::PartitionError,
                  "excluding '" + id + "' leaves '" + edge->consumer + "' without a provider");
    }
  }
  SystemModel next = model;
  next.mutable_at(i).excluded = true;
  return {next, detail::capacity_factor(next, i)};
}

inline DegradeResult readmit(const SystemModel& model, const std::string& id) {
  const auto i = model.index_of(id);
  SystemModel next = model;
  next.mutable_at(i).excluded = false;
  return {next, detail::capacity_factor(next, i)};
}

// ---------------------------------------------------------------------------
// Config documents

namespace detail {

using namespace json_util;

inline LifetimeDistribution parse_distribution(const std::string& kind, const Json& params, const std::string& path) {
  if (kind == "exponential") return LifetimeDistribution::exponential(number(require(params, "rate", path), join(path, "rate")));
  if (kind == "weibull") {
    return LifetimeDistribution::weibull(number(require(params, "shape", path), join(path, "shape")),
                                         number(require(params, "scale", path), join(path, "scale")));
  }
  if (kind == "empirical") {
    const auto& arr = array(require(params, "samples", path), join(path, "samples"));
    std::vector<double> xs;
    for (std::size_t i = 0; i < arr.size(); ++i) xs.push_back(number(arr[i], join(join(path, "samples"), i)));
    return LifetimeDistribution::empirical(std::move(xs));
  }
  throw SchemaError(path, "unknown distribution '" + kind + "'");
}

inline Json distribution_to_json(const LifetimeDistribution& d) {
  return std::visit(overloaded{
                        [](const Exponential& e) { return Json{{"dist", "exponential"}, {"params", {{"rate", e.rate}}}}; },
                        [](const Weibull& w) {
                          return Json{{"dist", "weibull"}, {"params", {{"shape", w.shape}, {"scale", w.scale}}}};
                        },
                        [](const Empirical& e) { return Json{{"dist", "empirical"}, {"params", {{"samples", e.samples}}}}; },
                    },
                    d.get());
}

inline LifetimeDistribution guarded_distribution(const std::string& kind, const Json& params, const std::string& path) {
  try {
    return parse_distribution(kind, params, path);
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
}

inline FaultSource parse_fault_source(const Json& j, const std::string& path) {
  only_keys(j, {"classes", "dist", "params", "activation_delay_h", "recurrence_h", "failure", "mask_probability",
                "multiplicity", "precursor"},
            path);
  FaultSource s;
  try {
    s.descriptor_template = parse_fault_descriptor(string(require(j, "classes", path), join(path, "classes")));
    if (const Json* f = optional(j, "failure", path)) s.failure = parse_failure_descriptor(string(*f, join(path, "failure")));
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(join(path, "classes"), e.what());
  }
  const std::string dist = string(require(j, "dist", path), join(path, "dist"));
  const Json empty = Json::object();
  const Json* params = optional(j, "params", path);
  const Json& p = params ? *params : empty;
  const std::string ppath = join(path, "params");
  if (dist == "none") {
    s.arrival = ArrivalKind::none;
  } else if (dist == "scripted") {
    s.arrival = ArrivalKind::scripted;
    const auto& times = array(require(p, "times", ppath), join(ppath, "times"));
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double t = number(times[i], join(join(ppath, "times"), i));
      if (t < 0.0) throw SchemaError(join(join(ppath, "times"), i), "time must be >= 0");
      s.scripted_times.push_back(t);
    }
    std::sort(s.scripted_times.begin(), s.scripted_times.end());
  } else if (dist == "exponential" && p.is_object() && p.contains("rate") && p["rate"].is_number() &&
             p["rate"].get<double>() == 0.0) {
    s.arrival = ArrivalKind::none;  // zero-rate source
  } else {
    s.arrival = ArrivalKind::distribution;
    s.interarrival = guarded_distribution(dist, p, ppath);
  }
  if (const Json* d = optional(j, "activation_delay_h", path)) {
    s.activation_delay_h = number(*d, join(path, "activation_delay_h"));
    if (*s.activation_delay_h < 0.0) throw SchemaError(join(path, "activation_delay_h"), "must be >= 0");
  }
  if (const Json* r = optional(j, "recurrence_h", path)) {
    s.recurrence_h = number(*r, join(path, "recurrence_h"));
    if (!(*s.recurrence_h > 0.0)) throw SchemaError(join(path, "recurrence_h"), "must be > 0");
    if (s.descriptor_template.persistence != Persistence::intermittent) {
      throw SchemaError(join(path, "recurrence_h"), "only intermittent sources recur");
    }
  }
  s.mask_probability = number_or(j, "mask_probability", path, 0.0);
  if (s.mask_probability < 0.0 || s.mask_probability > 1.0) {
    throw SchemaError(join(path, "mask_probability"), "must lie in [0,1]");
  }
  s.multiplicity = static_cast<int>(number_or(j, "multiplicity", path, 1.0));
  if (s.multiplicity < 1) throw SchemaError(join(path, "multiplicity"), "must be >= 1");
  if (const Json* pc = optional(j, "precursor", path)) {
    const std::string pp = join(path, "precursor");
    only_keys(*pc, {"lead_h", "baseline", "peak", "noise"}, pp);
    Precursor pr;
    pr.lead_h = number(require(*pc, "lead_h", pp), join(pp, "lead_h"));
    pr.baseline = number_or(*pc, "baseline", pp, 0.0);
    pr.peak = number(require(*pc, "peak", pp), join(pp, "peak"));
    pr.noise = number_or(*pc, "noise", pp, 0.0);
    if (!(pr.lead_h > 0.0)) throw SchemaError(join(pp, "lead_h"), "must be > 0");
    if (pr.noise < 0.0) throw SchemaError(join(pp, "noise"), "must be >= 0");
    s.precursor = pr;
  }
  return s;
}

inline Json fault_source_to_json(const FaultSource& s) {
  Json j;
  j["classes"] = to_string(s.descriptor_template);
  switch (s.arrival) {
    case ArrivalKind::none: j["dist"] = "none"; break;
    case ArrivalKind::scripted:
      j["dist"] = "scripted";
      j["params"] = {{"times", s.scripted_times}};
      break;
    case ArrivalKind::distribution: {
      auto d = distribution_to_json(*s.interarrival);
      j["dist"] = d["dist"];
      j["params"] = d["params"];
      break;
    }
  }
  if (s.activation_delay_h) j["activation_delay_h"] = *s.activation_delay_h;
  if (s.recurrence_h) j["recurrence_h"] = *s.recurrence_h;
  j["failure"] = to_string(s.failure);
  if (s.mask_probability != 0.0) j["mask_probability"] = s.mask_probability;
  if (s.multiplicity != 1) j["multiplicity"] = s.multiplicity;
  if (s.precursor) {
    j["precursor"] = {{"lead_h", s.precursor->lead_h},
                      {"baseline", s.precursor->baseline},
                      {"peak", s.precursor->peak},
                      {"noise", s.precursor->noise}};
  }
  return j;
}

inline RepairModel parse_repair(const Json& j, const std::string& path) {
  only_keys(j, {"fixed_h", "dist", "params"}, path);
  if (const Json* f = optional(j, "fixed_h", path)) {
    const double h = number(*f, join(path, "fixed_h"));
    if (h < 0.0) throw SchemaError(join(path, "fixed_h"), "must be >= 0");
    return h;
  }
  const std::string dist = string(require(j, "dist", path), join(path, "dist"));
  const Json* p = optional(j, "params", path);
  return guarded_distribution(dist, p ? *p : Json::object(), join(path, "params"));
}

inline Json repair_to_json(const RepairModel& r) {
  if (const auto* h = std::get_if<double>(&r)) return Json{{"fixed_h", *h}};
  if (const auto* d = std::get_if<LifetimeDistribution>(&r)) return distribution_to_json(*d);
  return nullptr;
}

inline void parse_component(const Json& j, const std::string& path, int parent, SystemModel& model) {
  only_keys(j, {"id", "name", "scope", "app", "compose", "lifecycle", "state", "repair", "fault_sources", "weight",
                "utilization", "spare", "maintenance", "children"},
            path);
  Component c;
  c.id = string(require(j, "id", path), join(path, "id"));
  if (c.id.empty() || c.id.find_first_of(" \t\n=") != std::string::npos) {
    throw SchemaError(join(path, "id"), "component ids must be non-empty and contain no spaces or '='");
  }
  if (model.find(c.id)) throw SchemaError(join(path, "id"), "duplicate component id '" + c.id + "'");
  c.name = string_or(j, "name", path, c.id);
  if (const Json* s = optional(j, "scope", path)) c.scope = enum_field<Scope, 2>(*s, join(path, "scope"));
  c.app = string_or(j, "app", path, c.scope == Scope::application ? c.id : "");
  if (const Json* s = optional(j, "compose", path)) c.compose = enum_field<Composition, 2>(*s, join(path, "compose"));
  if (const Json* s = optional(j, "lifecycle", path)) c.lifecycle = enum_field<Lifecycle, 3>(*s, join(path, "lifecycle"));
  if (const Json* st = optional(j, "state", path)) {
    if (!st->is_object()) throw SchemaError(join(path, "state"), "expected an object");
    for (auto it = st->begin(); it != st->end(); ++it) {
      const std::string sp = join(join(path, "state"), it.key());
      auto aspect = enum_field<StateAspect, 4>(Json(it.key()), sp);
      const double units = number(it.value(), sp);
      if (units < 0.0) throw SchemaError(sp, "state size must be >= 0");
      c.state_profile[aspect] = units;
    }
  }
  if (const Json* r = optional(j, "repair", path)) c.repair = parse_repair(*r, join(path, "repair"));
  if (const Json* fs = optional(j, "fault_sources", path)) {
    const std::string fp = join(path, "fault_sources");
    for (std::size_t i = 0; i < array(*fs, fp).size(); ++i) c.fault_sources.push_back(parse_fault_source((*fs)[i], join(fp, i)));
  }
  c.weight = number_or(j, "weight", path, c.scope == Scope::application ? 1.0 : 0.0);
  if (c.weight < 0.0) throw SchemaError(join(path, "weight"), "must be >= 0");
  c.utilization = number_or(j, "utilization", path, 0.0);
  c.spare = boolean_or(j, "spare", path, false);
  if (const Json* ms = optional(j, "maintenance", path)) {
    const std::string mp = join(path, "maintenance");
    for (std::size_t i = 0; i < array(*ms, mp).size(); ++i) {
      const std::string wp = join(mp, i);
      only_keys((*ms)[i], {"start_h", "duration_h"}, wp);
      MaintenanceWindow w{number(require((*ms)[i], "start_h", wp), join(wp, "start_h")),
                          number(require((*ms)[i], "duration_h", wp), join(wp, "duration_h"))};
      if (w.start_h < 0.0 || !(w.duration_h > 0.0)) throw SchemaError(wp, "window needs start >= 0 and duration > 0");
      c.maintenance.push_back(w);
    }
  }
  const auto idx = model.add_component(std::move(c), parent);
  if (const Json* ch = optional(j, "children", path)) {
    const std::string cp = join(path, "children");
    for (std::size_t i = 0; i < array(*ch, cp).size(); ++i) {
      parse_component((*ch)[i], join(cp, i), static_cast<int>(idx), model);
    }
  }
}

inline Json component_to_json(const SystemModel& m, std::size_t i) {
  const auto& c = m.at(i);
  Json j;
  j["id"] = c.id;
  j["name"] = c.name;
  j["scope"] = to_string(c.scope);
  if (!c.app.empty()) j["app"] = c.app;
  j["compose"] = to_string(c.compose);
  j["lifecycle"] = to_string(c.lifecycle);
  if (!c.state_profile.empty()) {
    Json st = Json::object();
    for (const auto& [a, u] : c.state_profile) st[std::string(to_string(a))] = u;
    j["state"] = st;
  }
  if (!std::holds_alternative<std::monostate>(c.repair)) j["repair"] = repair_to_json(c.repair);
  if (!c.fault_sources.empty()) {
    j["fault_sources"] = Json::array();
    for (const auto& s : c.fault_sources) j["fault_sources"].push_back(fault_source_to_json(s));
  }
  j["weight"] = c.weight;
  if (c.utilization != 0.0) j["utilization"] = c.utilization;
  if (c.spare) j["spare"] = true;
  if (!c.maintenance.empty()) {
    j["maintenance"] = Json::array();
    for (const auto& w : c.maintenance) j["maintenance"].push_back({{"start_h", w.start_h}, {"duration_h", w.duration_h}});
  }
  if (!c.children.empty()) {
    j["children"] = Json::array();
    for (auto ch : c.children) j["children"].push_back(component_to_json(m, ch));
  }
  return j;
}

inline bool has_cycle(const SystemModel& m) {
  // Kahn's algorithm over service edges.
  std::map<std::string, int> indeg;
  for (const auto& c : m.components()) indeg[c.id] = 0;
  for (const auto& e : m.edges()) ++indeg[e.consumer];
  std::vector<std::string> ready;
  for (const auto& [id, d] : indeg) {
    if (d == 0) ready.push_back(id);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    auto id = ready.back();
    ready.pop_back();
    ++visited;
    for (const auto* e : m.consumers_of(id)) {
      if (--indeg[e->consumer] == 0) ready.push_back(e->consumer);
    }
  }
  return visited != indeg.size();
}

}  // namespace detail

/// Builds a validated model from the `system` and `edges` sections.
inline SystemModel build_model(const Json& doc) {
  using namespace json_util;
  SystemModel model;
  detail::parse_component(require(doc, "system", ""), "/system", -1, model);
  if (const Json* edges = optional(doc, "edges", "")) {
    for (std::size_t i = 0; i < array(*edges, "/edges").size(); ++i) {
      const std::string ep = join(std::string("/edges"), i);
      const Json& e = (*edges)[i];
      only_keys(e, {"from", "to", "semantics"}, ep);
      ServiceEdge edge;
      edge.provider = string(require(e, "from", ep), join(ep, "from"));
      edge.consumer = string(require(e, "to", ep), join(ep, "to"));
      if (const Json* s = optional(e, "semantics", ep)) edge.semantics = enum_field<Composition, 2>(*s, join(ep, "semantics"));
      if (!model.find(edge.provider)) throw SchemaError(join(ep, "from"), "unknown component '" + edge.provider + "'");
      if (!model.find(edge.consumer)) throw SchemaError(join(ep, "to"), "unknown component '" + edge.consumer + "'");
      if (edge.provider == edge.consumer) throw SchemaError(ep, "self edge");
      model.add_edge(std::move(edge));
    }
  }
  if (detail::has_cycle(model)) throw SchemaError("/edges", "service edges must form a DAG");
  return model;
}

inline Json model_to_json(const SystemModel& m) {
  Json doc;
  doc["system"] = detail::component_to_json(m, 0);
  doc["edges"] = Json::array();
  for (const auto& e : m.edges()) {
    doc["edges"].push_back({{"from", e.provider}, {"to", e.consumer}, {"semantics", to_string(e.semantics)}});
  }
  return doc;
}

inline ProtectionDomain parse_domain(const Json& j, const std::string& path) {
  using namespace json_util;
  only_keys(j, {"components", "aspects"}, path);
  ProtectionDomain d;
  for (auto& c : strings(require(j, "components", path), join(path, "components"))) d.components.insert(c);
  const auto& aspects = array(require(j, "aspects", path), join(path, "aspects"));
  for (std::size_t i = 0; i < aspects.size(); ++i) {
    d.aspects.insert(enum_field<StateAspect, 4>(aspects[i], join(join(path, "aspects"), i)));
  }
  return d;
}

inline Json domain_to_json(const ProtectionDomain& d) {
  Json j;
  j["components"] = Json::array();
  for (const auto& c : d.components) j["components"].push_back(c);
  j["aspects"] = Json::array();
  for (auto a : d.aspects) j["aspects"].push_back(std::string(to_string(a)));
  return j;
}

}  // namespace resilsim
