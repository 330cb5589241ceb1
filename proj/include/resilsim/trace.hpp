#pragma once

// Line-delimited simulation trace and the report computed from it.
// Reports depend only on trace records, so a stored trace reproduces the
// run-time report exactly.

#include <charconv>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "resilsim/error.hpp"
#include "resilsim/json_util.hpp"
#include "resilsim/metrics.hpp"
#include "resilsim/system_model.hpp"
#include "resilsim/taxonomy.hpp"

namespace resilsim {

enum class RecordKind { fault, error, failure, detect, predict, respond, checkpoint, restore, status };

constexpr std::string_view to_string(RecordKind v) {
  constexpr std::string_view n[] = {"fault",   "error",      "failure", "detect", "predict",
                                    "respond", "checkpoint", "restore", "status"};
  return n[static_cast<int>(v)];
}

struct TraceRecord {
  double t = 0.0;
  std::uint64_t seq = 0;
  RecordKind kind = RecordKind::status;
  std::string comp;
  std::string cls = "-";
  std::optional<std::uint64_t> cause;
  std::string note;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Shortest decimal text that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string render_record(const TraceRecord& r) {
  std::string out;
  out.reserve(64 + r.note.size());
  out += "t=";
  out += format_number(r.t);
  out += " seq=";
  out += std::to_string(r.seq);
  out += " kind=";
  out += to_string(r.kind);
  out += " comp=";
  out += r.comp;
  out += " class=";
  out += r.cls;
  out += " cause=";
  out += r.cause ? std::to_string(*r.cause) : "-";
  out += " note=";
  out += r.note;
  return out;
}

inline std::string render_trace(const std::vector<TraceRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += render_record(r);
    out += '\n';
  }
  return out;
}

namespace detail {

inline std::string_view take_field(std::string_view& rest, std::string_view key, std::size_t line, bool last = false) {
  if (rest.substr(0, key.size()) != key || rest.size() <= key.size() || rest[key.size()] != '=') {
    throw TraceParseError(line, "expected field '" + std::string(key) + "='");
  }
  rest.remove_prefix(key.size() + 1);
  if (last) {
    auto v = rest;
    rest = {};
    return v;
  }
  const auto sp = rest.find(' ');
  if (sp == std::string_view::npos) throw TraceParseError(line, "record truncated after '" + std::string(key) + "'");
  auto v = rest.substr(0, sp);
  rest.remove_prefix(sp + 1);
  return v;
}

inline double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw TraceParseError(line, "bad number '" + std::string(s) + "'");
  }
  return v;
}

inline std::uint64_t parse_u64(std::string_view s, std::size_t line) {
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw TraceParseError(line, "bad integer '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace detail

inline TraceRecord parse_record(std::string_view text, std::size_t line) {
  TraceRecord r;
  auto rest = text;
  r.t = detail::parse_double(detail::take_field(rest, "t", line), line);
  r.seq = detail::parse_u64(detail::take_field(rest, "seq", line), line);
  const auto kind = detail::take_field(rest, "kind", line);
  bool found = false;
  for (int k = 0; k <= static_cast<int>(RecordKind::status); ++k) {
    if (to_string(static_cast<RecordKind>(k)) == kind) {
      r.kind = static_cast<RecordKind>(k);
      found = true;
    }
  }
  if (!found) throw TraceParseError(line, "unknown kind '" + std::string(kind) + "'");
  r.comp = std::string(detail::take_field(rest, "comp", line));
  r.cls = std::string(detail::take_field(rest, "class", line));
  const auto cause = detail::take_field(rest, "cause", line);
  if (cause != "-") r.cause = detail::parse_u64(cause, line);
  r.note = std::string(detail::take_field(rest, "note", line, true));
  if (r.comp.empty()) throw TraceParseError(line, "empty component");
  return r;
}

/// Parses a whole trace; blank lines are rejected so truncation is visible.
inline std::vector<TraceRecord> parse_trace(std::string_view text) {
  std::vector<TraceRecord> out;
  std::size_t line = 0;
  while (!text.empty()) {
    ++line;
    const auto nl = text.find('\n');
    const auto row = text.substr(0, nl);
    if (row.empty()) throw TraceParseError(line, "empty line");
    out.push_back(parse_record(row, line));
    if (out.back().seq != out.size() - 1) throw TraceParseError(line, "sequence numbers must count up from 0");
    if (out.size() > 1 && out.back().t < out[out.size() - 2].t) throw TraceParseError(line, "time goes backwards");
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
  }
  return out;
}

/// Value of `key=` inside a note, if present.
inline std::optional<std::string_view> note_value(std::string_view note, std::string_view key) {
  std::size_t pos = 0;
  while (pos < note.size()) {
    const auto end = std::min(note.find(' ', pos), note.size());
    const auto tok = note.substr(pos, end - pos);
    if (tok.size() > key.size() && tok.substr(0, key.size()) == key && tok[key.size()] == '=') {
      return tok.substr(key.size() + 1);
    }
    pos = end + 1;
  }
  return std::nullopt;
}

inline bool note_has(std::string_view note, std::string_view word) {
  std::size_t pos = 0;
  while (pos < note.size()) {
    const auto end = std::min(note.find(' ', pos), note.size());
    if (note.substr(pos, end - pos) == word) return true;
    pos = end + 1;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Causality chain of a trace

/// Fault, error and failure records as a DAG; event ids are seq + 1.
inline CausalityChain chain_from_trace(const std::vector<TraceRecord>& records) {
  CausalityChain chain;
  for (const auto& r : records) {
    if (r.kind != RecordKind::fault && r.kind != RecordKind::error && r.kind != RecordKind::failure) continue;
    Event e;
    e.id = r.seq + 1;
    e.time = r.t;
    e.component = r.comp;
    if (r.cause) e.cause = *r.cause + 1;
    try {
      switch (r.kind) {
        case RecordKind::fault:
          e.kind = EventKind::fault;
          e.descriptor = parse_fault_descriptor(r.cls);
          break;
        case RecordKind::error:
          e.kind = EventKind::error;
          e.descriptor = parse_error_descriptor(r.cls);
          break;
        default:
          e.kind = EventKind::failure;
          e.descriptor = parse_failure_descriptor(r.cls);
          break;
      }
    } catch (const Error& ex) {
      throw TraceParseError(r.seq + 1, ex.what());
    }
    chain.add(std::move(e));
  }
  return chain;
}

// ---------------------------------------------------------------------------
// Report

struct Accounting {
  double progress = 0.0;
  double lost = 0.0;
  double overhead = 0.0;
  double idle = 0.0;
  double workload = 0.0;  // rate * horizon
};

struct ChainStats {
  std::size_t faults = 0, errors = 0, failures = 0;
  std::size_t masked = 0, dce = 0, due = 0, sdc = 0;
  std::size_t cascades = 0, detections = 0, predictions = 0, responses = 0;
  std::size_t checkpoints = 0, restores = 0, avoided = 0, unhandled = 0;
  std::size_t violations = 0;
};

struct SimReport {
  std::uint64_t seed = 0;
  double horizon_h = 0.0;
  Estimate mttf_h;
  double fit = 0.0;
  double availability = 1.0;
  std::optional<int> nines;
  double downtime_annual_s = 0.0;
  std::string downtime_annual;
  std::optional<double> precision;
  std::optional<double> recall;
  Estimate smttf_h, smttr_h;
  std::map<std::string, Estimate> amttf_h, amttr_h;
  StatusClock root_status;
  Accounting accounting;
  DetectionTally tally;
  ChainStats chain;
};

namespace detail {

struct Occupancy {
  Status status = Status::service_delivery;
  double since = 0.0;
  StatusClock clock;
  std::vector<OutageInterval> outages;
  std::size_t failures = 0;
  std::string scope = "system";
  std::string app = "-";
  bool leaf = true;
};

inline Status parse_status(std::string_view s, std::size_t line) {
  for (int k = 0; k < 3; ++k) {
    if (to_string(static_cast<Status>(k)) == s) return static_cast<Status>(k);
  }
  throw TraceParseError(line, "unknown status '" + std::string(s) + "'");
}

inline double note_number(const TraceRecord& r, std::string_view key) {
  auto v = note_value(r.note, key);
  if (!v) throw TraceParseError(r.seq + 1, "note lacks '" + std::string(key) + "'");
  return parse_double(*v, r.seq + 1);
}

/// Merges per-member outage intervals into the union of down time.
inline std::vector<OutageInterval> merge_outages(std::vector<OutageInterval> v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return std::tie(a.start, a.end) < std::tie(b.start, b.end); });
  std::vector<OutageInterval> out;
  for (const auto& o : v) {
    if (!out.empty() && o.start <= out.back().end) out.back().end = std::max(out.back().end, o.end);
    else out.push_back(o);
  }
  return out;
}

}  // namespace detail

/// Computes every metric from trace records alone.
inline SimReport compute_report(const std::vector<TraceRecord>& records) {
  SimReport rep;
  if (records.empty()) {
    rep.horizon_h = 0.0;
    rep.mttf_h = {0.0, true};
    rep.smttf_h = {0.0, true};
    return rep;
  }
  const auto& begin = records.front();
  if (begin.kind != RecordKind::status || !note_has(begin.note, "begin")) {
    throw TraceParseError(1, "trace must open with a begin record");
  }
  rep.seed = static_cast<std::uint64_t>(detail::parse_u64(note_value(begin.note, "seed").value_or(""), 1));
  rep.horizon_h = detail::note_number(begin, "horizon");
  const double rate = detail::note_number(begin, "rate");
  const std::string root = begin.comp;

  std::map<std::string, detail::Occupancy> occ;
  std::vector<std::string> order;
  std::set<std::string> parents;
  bool ended = false;

  for (const auto& r : records) {
    const std::size_t line = r.seq + 1;
    switch (r.kind) {
      case RecordKind::status: {
        if (note_has(r.note, "init")) {
          auto& o = occ[r.comp];
          o.scope = std::string(note_value(r.note, "scope").value_or("system"));
          o.app = std::string(note_value(r.note, "app").value_or("-"));
          o.status = detail::parse_status(note_value(r.note, "status").value_or(""), line);
          o.since = r.t;
          o.clock.since = r.t;
          o.clock.status = o.status;
          if (auto p = note_value(r.note, "parent"); p && *p != "-") parents.insert(std::string(*p));
          order.push_back(r.comp);
        } else if (auto to = note_value(r.note, "to")) {
          auto it = occ.find(r.comp);
          if (it == occ.end()) throw TraceParseError(line, "status change for undeclared component");
          auto& o = it->second;
          const Status next = detail::parse_status(*to, line);
          SystemModel::accrue(o.clock, r.t);
          if (o.status == Status::unscheduled_outage) o.outages.back().end = r.t;
          if (next == Status::unscheduled_outage) o.outages.push_back({r.t, r.t});
          o.status = next;
          o.clock.status = next;
        } else if (note_has(r.note, "end")) {
          rep.accounting.progress = detail::note_number(r, "progress");
          rep.accounting.lost = detail::note_number(r, "lost");
          rep.accounting.overhead = detail::note_number(r, "overhead");
          rep.accounting.idle = detail::note_number(r, "idle");
          rep.chain.sdc = static_cast<std::size_t>(detail::note_number(r, "sdc"));
          rep.chain.avoided = static_cast<std::size_t>(detail::note_number(r, "avoided"));
          ended = true;
        }
        break;
      }
      case RecordKind::fault:
        ++rep.chain.faults;
        if (r.cause) ++rep.chain.cascades;
        break;
      case RecordKind::error: {
        ++rep.chain.errors;
        const auto d = parse_error_descriptor(r.cls);
        if (d.masking == Masking::masked) ++rep.chain.masked;
        if (has_term(d, CommonTerm::dce)) ++rep.chain.dce;
        if (has_term(d, CommonTerm::due)) ++rep.chain.due;
        break;
      }
      case RecordKind::failure: {
        ++rep.chain.failures;
        if (note_has(r.note, "unhandled")) ++rep.chain.unhandled;
        auto it = occ.find(r.comp);
        if (it != occ.end()) ++it->second.failures;
        break;
      }
      case RecordKind::detect:
        ++rep.chain.detections;
        if (r.cls == "true-positive") ++rep.tally.tp;
        else if (r.cls == "false-positive") ++rep.tally.fp;
        else if (r.cls == "false-negative") ++rep.tally.fn;
        else throw TraceParseError(line, "unknown detection class '" + r.cls + "'");
        break;
      case RecordKind::predict: ++rep.chain.predictions; break;
      case RecordKind::respond: ++rep.chain.responses; break;
      case RecordKind::checkpoint: ++rep.chain.checkpoints; break;
      case RecordKind::restore: ++rep.chain.restores; break;
    }
  }
  const double horizon = rep.horizon_h;
  for (auto& [id, o] : occ) {
    SystemModel::accrue(o.clock, horizon);
    if (o.status == Status::unscheduled_outage) o.outages.back().end = horizon;
    o.leaf = !parents.count(id);
  }
  rep.accounting.workload = rate * horizon;
  if (!ended) rep.accounting.idle = rep.accounting.workload;

  const auto root_it = occ.find(root);
  if (root_it == occ.end()) throw TraceParseError(1, "root component not declared");
  rep.root_status = root_it->second.clock;
  const auto& rc = rep.root_status;
  rep.availability = availability_from_times(rc.t_pu, rc.t_ud, rc.t_sd);
  if (rep.availability < 1.0) {
    const auto n = nines_rating(rep.availability);
    rep.nines = n.nines;
    rep.downtime_annual = n.downtime;
  } else {
    rep.downtime_annual = "0 seconds";
  }
  rep.downtime_annual_s = (1.0 - rep.availability) * kHoursPerYear * 3600.0;

  double exposure = 0.0;
  std::size_t leaf_failures = 0;
  for (const auto& id : order) {
    const auto& o = occ.at(id);
    if (!o.leaf) continue;
    exposure += o.clock.t_pu;
    leaf_failures += o.failures;
  }
  if (leaf_failures == 0) rep.mttf_h = {horizon, true};
  else rep.mttf_h = {exposure / static_cast<double>(leaf_failures), false};
  rep.fit = rep.mttf_h.value > 0.0 ? fit_rate(rep.mttf_h.value) : 0.0;

  if (rep.tally.tp + rep.tally.fp > 0) rep.precision = precision(rep.tally);
  if (rep.tally.tp + rep.tally.fn > 0) rep.recall = recall(rep.tally);

  if (horizon > 0.0) {
    PerspectiveLog log;
    log.horizon = horizon;
    log.system = root_it->second.outages;
    std::map<std::string, std::vector<OutageInterval>> apps;
    for (const auto& id : order) {
      const auto& o = occ.at(id);
      if (o.scope != "application") continue;
      auto& v = apps[o.app == "-" ? id : o.app];
      v.insert(v.end(), o.outages.begin(), o.outages.end());
    }
    for (auto& [app, v] : apps) log.applications[app] = detail::merge_outages(std::move(v));
    const auto pm = perspective_metrics(log);
    rep.smttf_h = pm.smttf;
    rep.smttr_h = pm.smttr;
    rep.amttf_h = pm.amttf;
    rep.amttr_h = pm.amttr;
  }

  rep.chain.violations = validate_chain(chain_from_trace(records)).violations.size();
  return rep;
}

inline Json report_to_json(const SimReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  Json j;
  j["seed"] = r.seed;
  j["horizon_h"] = r.horizon_h;
  j["mttf_h"] = r.mttf_h.value;
  j["fit"] = r.fit;
  j["availability"] = r.availability;
  j["nines"] = r.nines ? Json(*r.nines) : Json(nullptr);
  j["downtime_annual_s"] = r.downtime_annual_s;
  j["downtime_annual"] = r.downtime_annual;
  j["precision"] = opt(r.precision);
  j["recall"] = opt(r.recall);
  j["smttf_h"] = r.smttf_h.value;
  j["smttr_h"] = r.smttr_h.value;
  j["amttf_h"] = Json::object();
  j["amttr_h"] = Json::object();
  Json lower = Json::array();
  if (r.mttf_h.lower_bound) lower.push_back("mttf_h");
  if (r.smttf_h.lower_bound) lower.push_back("smttf_h");
  if (r.smttr_h.lower_bound) lower.push_back("smttr_h");
  for (const auto& [app, e] : r.amttf_h) {
    j["amttf_h"][app] = e.value;
    if (e.lower_bound) lower.push_back("amttf_h/" + app);
  }
  for (const auto& [app, e] : r.amttr_h) {
    j["amttr_h"][app] = e.value;
    if (e.lower_bound) lower.push_back("amttr_h/" + app);
  }
  j["lower_bounds"] = lower;
  j["status_h"] = {{"service_delivery", r.root_status.t_pu},
                   {"unscheduled_outage", r.root_status.t_ud},
                   {"scheduled_outage", r.root_status.t_sd}};
  j["accounting"] = {{"workload", r.accounting.workload},
                     {"progress", r.accounting.progress},
                     {"lost", r.accounting.lost},
                     {"overhead", r.accounting.overhead},
                     {"idle", r.accounting.idle}};
  j["detection"] = {{"tp", r.tally.tp}, {"fp", r.tally.fp}, {"tn", r.tally.tn}, {"fn", r.tally.fn}};
  const auto& c = r.chain;
  j["chain"] = {{"faults", c.faults},           {"errors", c.errors},         {"failures", c.failures},
                {"masked", c.masked},           {"dce", c.dce},               {"due", c.due},
                {"sdc", c.sdc},                 {"cascades", c.cascades},     {"detections", c.detections},
                {"predictions", c.predictions}, {"responses", c.responses},   {"checkpoints", c.checkpoints},
                {"restores", c.restores},       {"avoided", c.avoided},       {"unhandled", c.unhandled},
                {"violations", c.violations}};
  return j;
}

namespace detail {

inline std::string g10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string estimate_text(const Estimate& e) { return (e.lower_bound ? ">= " : "") + g10(e.value); }

}  // namespace detail

inline std::string report_to_text(const SimReport& r) {
  using detail::g10;
  std::ostringstream o;
  auto opt = [](const std::optional<double>& v) { return v ? g10(*v) : std::string("undefined"); };
  o << "seed: " << r.seed << "\n";
  o << "horizon_h: " << g10(r.horizon_h) << "\n";
  o << "mttf_h: " << detail::estimate_text(r.mttf_h) << "\n";
  o << "fit: " << g10(r.fit) << "\n";
  o << "availability: " << g10(r.availability) << "\n";
  o << "nines: " << (r.nines ? std::to_string(*r.nines) : std::string("-")) << "\n";
  o << "downtime_annual_s: " << g10(r.downtime_annual_s) << " (" << r.downtime_annual << ")\n";
  o << "precision: " << opt(r.precision) << "\n";
  o << "recall: " << opt(r.recall) << "\n";
  o << "smttf_h: " << detail::estimate_text(r.smttf_h) << "\n";
  o << "smttr_h: " << detail::estimate_text(r.smttr_h) << "\n";
  for (const auto& [app, e] : r.amttf_h) o << "amttf_h[" << app << "]: " << detail::estimate_text(e) << "\n";
  for (const auto& [app, e] : r.amttr_h) o << "amttr_h[" << app << "]: " << detail::estimate_text(e) << "\n";
  const auto& a = r.accounting;
  o << "progress: " << g10(a.progress) << "\n";
  o << "lost: " << g10(a.lost) << "\n";
  o << "overhead: " << g10(a.overhead) << "\n";
  o << "idle: " << g10(a.idle) << "\n";
  o << "detections: tp=" << r.tally.tp << " fp=" << r.tally.fp << " fn=" << r.tally.fn << "\n";
  const auto& c = r.chain;
  o << "chain: faults=" << c.faults << " errors=" << c.errors << " failures=" << c.failures << " masked=" << c.masked
    << " dce=" << c.dce << " due=" << c.due << " sdc=" << c.sdc << " cascades=" << c.cascades
    << " avoided=" << c.avoided << " violations=" << c.violations << "\n";
  return o.str();
}

}  // namespace resilsim
