#pragma once

// Deterministic discrete-event simulation of a modeled system under a
// resilience solution.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "resilsim/error.hpp"
#include "resilsim/json_util.hpp"
#include "resilsim/metrics.hpp"
#include "resilsim/patterns.hpp"
#include "resilsim/rng.hpp"
#include "resilsim/system_model.hpp"
#include "resilsim/taxonomy.hpp"
#include "resilsim/trace.hpp"

namespace resilsim {

struct SimConfig {
  SystemModel model;
  ResilienceSolution solution;
  double horizon_h = 100.0;
  std::uint64_t seed = 1;
  double workload_rate = 1.0;
};

/// Parses a full config document. Schema problems surface as ConfigError
/// carrying the offending path.
inline SimConfig parse_config(const Json& doc) {
  using namespace json_util;
  try {
    if (!doc.is_object()) throw SchemaError("", "config must be an object");
    only_keys(doc, {"system", "edges", "workload", "solution", "sim"}, "");
    SimConfig cfg;
    cfg.model = build_model(doc);
    if (const Json* w = optional(doc, "workload", "")) {
      only_keys(*w, {"rate"}, "/workload");
      cfg.workload_rate = number_or(*w, "rate", "/workload", 1.0);
      if (cfg.workload_rate < 0.0) throw SchemaError("/workload/rate", "must be >= 0");
    }
    if (const Json* s = optional(doc, "sim", "")) {
      only_keys(*s, {"horizon_h", "seed"}, "/sim");
      cfg.horizon_h = number_or(*s, "horizon_h", "/sim", 100.0);
      if (!(cfg.horizon_h > 0.0)) throw SchemaError("/sim/horizon_h", "must be > 0");
      if (const Json* seed = optional(*s, "seed", "/sim")) {
        if (!seed->is_number_integer() || (!seed->is_number_unsigned() && seed->get<std::int64_t>() < 0)) {
          throw SchemaError("/sim/seed", "expected an unsigned integer");
        }
        cfg.seed = seed->get<std::uint64_t>();
      }
    }
    if (const Json* sol = optional(doc, "solution", "")) {
      cfg.solution = parse_solution(*sol, "/solution");
      for (std::size_t i = 0; i < cfg.solution.size(); ++i) {
        for (const auto& c : cfg.solution[i].domain.components) {
          if (!cfg.model.find(c)) {
            throw SchemaError("/solution/" + std::to_string(i) + "/domain/components",
                              "unknown component '" + c + "'");
          }
        }
      }
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
}

inline Json config_to_json(const SimConfig& cfg) {
  Json doc = model_to_json(cfg.model);
  doc["workload"] = {{"rate", cfg.workload_rate}};
  doc["solution"] = solution_to_json(cfg.solution);
  doc["sim"] = {{"horizon_h", cfg.horizon_h}, {"seed", cfg.seed}};
  return doc;
}

/// Arrival times of one fault source in [0, horizon).
inline std::vector<double> inject(const FaultSource& source, RandomStream& rng, double horizon) {
  std::vector<double> times;
  switch (source.arrival) {
    case ArrivalKind::none: return times;
    case ArrivalKind::scripted:
      for (double t : source.scripted_times) {
        if (t < horizon) times.push_back(t);
      }
      break;
    case ArrivalKind::distribution: {
      double t = 0.0;
      while (true) {
        t += sample(*source.interarrival, rng);
        if (!(t < horizon)) break;
        times.push_back(t);
        if (source.recurrence_h) break;
      }
      break;
    }
  }
  if (source.recurrence_h && !times.empty()) {
    const double t0 = times.front();
    times.clear();
    for (std::size_t k = 0;; ++k) {
      const double t = t0 + static_cast<double>(k) * *source.recurrence_h;
      if (!(t < horizon)) break;
      times.push_back(t);
    }
  }
  return times;
}

struct SimResult {
  std::vector<TraceRecord> trace;
  SimReport report;
  SolutionVerdict verdict;
  SystemModel final_model;
};

namespace detail {

enum class QKind {
  fault_arrival,
  activation,
  monitor_check,
  false_alarm,
  checkpoint_timer,
  predict_sample,
  busy_end,
  repair_end,
  restart_ready,
  maintenance_start,
  maintenance_end,
  readmit,
};

struct QEvent {
  double t = 0.0;
  std::uint64_t seq = 0;
  QKind kind = QKind::fault_arrival;
  std::size_t comp = 0;
  std::size_t aux = 0;       // source index, instance index or worker index
  std::uint64_t ref = 0;     // trace seq or token
  double value = 0.0;

  bool operator>(const QEvent& o) const { return t != o.t ? t > o.t : seq > o.seq; }
};

enum class WorkerState { running, busy, paused, down, excluded };

enum class RestartMode { scratch, checkpoint, forward, preserve };

struct PendingRestart {
  RestartMode mode = RestartMode::scratch;
  double ready_at = 0.0;
  double cost_h = 0.0;
  int instance = -1;
  std::optional<std::uint64_t> cause;
  bool spurious = false;
};

struct Worker {
  std::size_t comp = 0;
  double rate = 0.0;
  WorkerState state = WorkerState::running;
  double last = 0.0;
  double progress = 0.0, lost = 0.0, overhead = 0.0, idle = 0.0;
  double busy_until = 0.0;
  std::uint64_t token = 0;
  double failed_at = 0.0;
  std::optional<PendingRestart> pending;
  bool restoring = false;  // busy with a restore; status returns when it ends
};

struct FaultInfo {
  std::size_t comp = 0;
  int source = -1;  // -1 = cascade
  FailureDescriptor failure;
  int multiplicity = 1;
  double mask_probability = 0.0;
};

struct CompState {
  Status own = Status::service_delivery;
  std::optional<std::uint64_t> failure_seq;  // unrecovered failure record
  FailureDescriptor failure;
  std::optional<std::uint64_t> root_fault;   // fault record behind the failure
  bool predicted = false;
  bool isolated_by_prediction = false;
};

enum class Outcome { unhandled, handled };

struct DetectCtx {
  std::size_t comp = 0;
  std::string source;                      // instance id or "self"
  std::uint64_t detect_seq = 0;
  std::optional<std::uint64_t> due_error;  // error-level DUE awaiting a handler
  bool spurious = false;
};

class Engine {
 public:
  explicit Engine(const SimConfig& cfg) : cfg_(cfg), model_(cfg.model) {}

  SimResult run() {
    setup();
    while (!queue_.empty()) {
      QEvent ev = queue_.top();
      if (!(ev.t < cfg_.horizon_h)) break;
      queue_.pop();
      now_ = ev.t;
      handle(ev);
    }
    finish();
    SimResult out;
    out.report = compute_report(trace_);
    out.trace = std::move(trace_);
    out.verdict = std::move(verdict_);
    out.final_model = std::move(model_);
    return out;
  }

 private:
  // -------------------------------------------------------------------------
  // setup

  void setup() {
    verdict_ = validate_solution(cfg_.solution, model_);
    comps_.assign(model_.size(), CompState{});
    worker_of_.assign(model_.size(), -1);

    double total_weight = 0.0;
    for (std::size_t i = 0; i < model_.size(); ++i) {
      const auto& c = model_.at(i);
      if (c.operational() && c.weight > 0.0) total_weight += c.weight;
    }
    for (std::size_t i = 0; i < model_.size(); ++i) {
      const auto& c = model_.at(i);
      if (total_weight > 0.0 ? (c.operational() && c.weight > 0.0) : i == 0) {
        Worker w;
        w.comp = i;
        w.rate = total_weight > 0.0 ? cfg_.workload_rate * c.weight / total_weight : cfg_.workload_rate;
        worker_of_[i] = static_cast<int>(workers_.size());
        workers_.push_back(w);
      }
    }

    const auto& root = model_.root();
    record(RecordKind::status, 0, "-", std::nullopt,
           "begin seed=" + std::to_string(cfg_.seed) + " horizon=" + format_number(cfg_.horizon_h) +
               " rate=" + format_number(cfg_.workload_rate));
    (void)root;
    for (std::size_t i = 0; i < model_.size(); ++i) {
      const auto& c = model_.at(i);
      record(RecordKind::status, i, "-", std::nullopt,
             "init scope=" + std::string(to_string(c.scope)) + " app=" + (c.app.empty() ? "-" : c.app) +
                 " status=" + std::string(to_string(c.clock.status)) +
                 " parent=" + (c.parent >= 0 ? model_.at(static_cast<std::size_t>(c.parent)).id : "-") +
                 " lifecycle=" + std::string(to_string(c.lifecycle)));
    }

    for (std::size_t i = 0; i < model_.size(); ++i) {
      const auto& c = model_.at(i);
      if (!c.operational()) continue;
      for (std::size_t k = 0; k < c.fault_sources.size(); ++k) {
        RandomStream rng(cfg_.seed, "fault/" + c.id + "/" + std::to_string(k));
        auto times = inject(c.fault_sources[k], rng, cfg_.horizon_h);
        for (double t : times) push(t, QKind::fault_arrival, i, k);
        if (c.fault_sources[k].precursor) {
          for (double t : times) precursors_[i].push_back({t, *c.fault_sources[k].precursor});
        }
      }
      for (const auto& w : c.maintenance) {
        push(w.start_h, QKind::maintenance_start, i, 0, 0, w.duration_h);
      }
    }

    for (std::size_t n = 0; n < cfg_.solution.size(); ++n) {
      const auto& inst = cfg_.solution[n];
      inst_rng_.emplace_back(cfg_.seed, "instance/" + inst.id);
      if (inst.structure == Structure::rollback || inst.structure == Structure::rollforward) {
        push(inst.num("interval_h"), QKind::checkpoint_timer, 0, n);
      }
      if (inst.structure == Structure::prediction) push(inst.num("sample_interval_h"), QKind::predict_sample, 0, n);
    }
  }

  // -------------------------------------------------------------------------
  // queue and trace helpers

  void push(double t, QKind kind, std::size_t comp, std::size_t aux, std::uint64_t ref = 0, double value = 0.0) {
    queue_.push(QEvent{t, next_q_++, kind, comp, aux, ref, value});
  }

  std::uint64_t record(RecordKind kind, std::size_t comp, std::string cls, std::optional<std::uint64_t> cause,
                       std::string note) {
    const std::uint64_t seq = trace_.size();
    trace_.push_back(TraceRecord{now_, seq, kind, model_.at(comp).id, std::move(cls), cause, std::move(note)});
    return seq;
  }

  RandomStream& repair_rng(std::size_t comp) {
    auto it = repair_rng_.find(comp);
    if (it == repair_rng_.end()) {
      it = repair_rng_.emplace(comp, RandomStream(cfg_.seed, "repair/" + model_.at(comp).id)).first;
    }
    return it->second;
  }

  RandomStream& mask_rng(std::size_t comp) {
    auto it = mask_rng_.find(comp);
    if (it == mask_rng_.end()) {
      it = mask_rng_.emplace(comp, RandomStream(cfg_.seed, "mask/" + model_.at(comp).id)).first;
    }
    return it->second;
  }

  double sample_repair(std::size_t comp) {
    const auto& r = model_.at(comp).repair;
    if (const auto* h = std::get_if<double>(&r)) return *h;
    if (const auto* d = std::get_if<LifetimeDistribution>(&r)) return sample(*d, repair_rng(comp));
    return 0.0;
  }

  // -------------------------------------------------------------------------
  // status bookkeeping

  static int severity(Status s) {
    switch (s) {
      case Status::service_delivery: return 0;
      case Status::scheduled_outage: return 1;
      case Status::unscheduled_outage: return 2;
    }
    return 0;
  }

  Status derived_status(std::size_t i) const {
    const auto& c = model_.at(i);
    Status s = comps_[i].own;
    if (c.scope != Scope::system) return s;
    std::vector<Status> kids;
    for (auto ch : c.children) {
      const auto& k = model_.at(ch);
      if (k.scope != Scope::system || !k.operational() || k.excluded) continue;
      kids.push_back(k.clock.status);
    }
    if (kids.empty()) return s;
    Status roll = Status::service_delivery;
    if (c.compose == Composition::serial) {
      for (auto k : kids) {
        if (severity(k) > severity(roll)) roll = k;
      }
    } else {
      const bool any_up = std::any_of(kids.begin(), kids.end(), [](Status k) { return k == Status::service_delivery; });
      if (!any_up) {
        roll = std::any_of(kids.begin(), kids.end(), [](Status k) { return k == Status::unscheduled_outage; })
                   ? Status::unscheduled_outage
                   : Status::scheduled_outage;
      }
    }
    return severity(roll) > severity(s) ? roll : s;
  }

  void refresh_status(std::size_t i, std::optional<std::uint64_t> cause) {
    const Status next = derived_status(i);
    if (next != model_.at(i).clock.status) {
      model_.apply_status(i, next, now_);
      record(RecordKind::status, i, "-", cause, "to=" + std::string(to_string(next)));
    }
    const int parent = model_.at(i).parent;
    if (parent >= 0 && model_.at(i).scope == Scope::system) refresh_status(static_cast<std::size_t>(parent), cause);
  }

  void set_own_status(std::size_t i, Status s, std::optional<std::uint64_t> cause) {
    comps_[i].own = s;
    refresh_status(i, cause);
    reconcile();
  }

  bool up(std::size_t i) const { return model_.at(i).clock.status == Status::service_delivery && !model_.at(i).excluded; }

  bool providers_up(std::size_t i) const {
    bool any_redundant = false, redundant_up = false;
    for (const auto* e : model_.providers_of(model_.at(i).id)) {
      const auto p = model_.index_of(e->provider);
      if (e->semantics == Composition::serial) {
        if (!up(p)) return false;
      } else {
        any_redundant = true;
        redundant_up = redundant_up || up(p);
      }
    }
    return !any_redundant || redundant_up;
  }

  bool runnable(std::size_t i) const { return up(i) && providers_up(i); }

  // -------------------------------------------------------------------------
  // worker accounting

  void settle(Worker& w) {
    const double dt = now_ - w.last;
    if (dt > 0.0) {
      const double work = w.rate * dt;
      switch (w.state) {
        case WorkerState::running: w.progress += work; break;
        case WorkerState::busy: w.overhead += work; break;
        case WorkerState::paused:
        case WorkerState::down:
        case WorkerState::excluded: w.idle += work; break;
      }
    }
    w.last = now_;
  }

  void make_busy(std::size_t wi, double cost_h) {
    auto& w = workers_[wi];
    if (cost_h <= 0.0) return;
    if (w.state != WorkerState::running && w.state != WorkerState::busy) return;
    settle(w);
    const double start = w.state == WorkerState::busy ? w.busy_until : now_;
    w.state = WorkerState::busy;
    w.busy_until = start + cost_h;
    push(w.busy_until, QKind::busy_end, w.comp, wi, w.token);
  }

  void worker_down(std::size_t wi) {
    auto& w = workers_[wi];
    settle(w);
    if (w.state != WorkerState::down) w.failed_at = now_;
    w.state = WorkerState::down;
    w.restoring = false;
    ++w.token;
  }

  /// Moves workers between running, paused and pending-restart states after
  /// any status change.
  void reconcile() {
    for (std::size_t wi = 0; wi < workers_.size(); ++wi) {
      auto& w = workers_[wi];
      if (model_.at(w.comp).excluded && w.state != WorkerState::excluded) {
        settle(w);
        w.state = WorkerState::excluded;
        ++w.token;
        continue;
      }
      switch (w.state) {
        case WorkerState::running:
          if (!runnable(w.comp)) {
            settle(w);
            w.state = WorkerState::paused;
          }
          break;
        case WorkerState::paused:
          if (runnable(w.comp)) {
            settle(w);
            w.state = WorkerState::running;
          }
          break;
        case WorkerState::down:
          if (w.pending && !w.restoring && w.pending->ready_at <= now_ && providers_up(w.comp)) begin_restart(wi);
          break;
        default: break;
      }
    }
  }

  void begin_restart(std::size_t wi) {
    auto& w = workers_[wi];
    const PendingRestart p = *w.pending;
    settle(w);
    std::string note;
    const std::string inst = p.instance >= 0 ? cfg_.solution[p.instance].id : std::string("repair");
    switch (p.mode) {
      case RestartMode::scratch: {
        const double lost = w.progress;
        w.lost += lost;
        w.progress = 0.0;
        for (auto& [key, store] : stores_) {
          if (key.second == wi) store = CheckpointStore(model_.at(w.comp).id);
        }
        note = "inst=" + inst + " mode=scratch lost=" + format_number(lost) + " progress=0";
        break;
      }
      case RestartMode::checkpoint: {
        auto& store = store_for(static_cast<std::size_t>(p.instance), wi);
        const auto rb = rollback_recover(store, w.failed_at);
        const double lost = w.progress - rb.restored_progress;
        w.lost += lost;
        w.progress = rb.restored_progress;
        store.discard_after(rb.restored_time);
        note = "inst=" + inst + " mode=rollback to=" + format_number(rb.restored_time) +
               " lost=" + format_number(lost) + " progress=" + format_number(w.progress) +
               (rb.from_start ? " from-start" : "");
        break;
      }
      case RestartMode::forward: {
        auto& store = store_for(static_cast<std::size_t>(p.instance), wi);
        const auto& inst_cfg = cfg_.solution[p.instance];
        std::optional<Journal> journal;
        if (inst_cfg.flag("journal")) journal = Journal{0.0, w.failed_at};
        const auto rf = rollforward_recover(store, journal, w.failed_at, w.progress, inst_cfg.num("rederive_h"));
        const double lost = w.progress - rf.restored_progress;
        w.lost += lost;
        w.progress = rf.restored_progress;
        store.discard_after(rf.restored_time);
        note = "inst=" + inst + " mode=rollforward to=" + format_number(rf.restored_time) +
               " lost=" + format_number(lost) + " progress=" + format_number(w.progress) +
               (rf.fell_back ? " journal-gap" : "");
        break;
      }
      case RestartMode::preserve:
        note = "inst=" + inst + " mode=preserve lost=0 progress=" + format_number(w.progress);
        break;
    }
    record(RecordKind::restore, w.comp, "-", p.cause, note);
    w.pending.reset();
    if (p.cost_h > 0.0) {
      w.state = WorkerState::busy;
      w.restoring = true;
      w.busy_until = now_ + p.cost_h;
      push(w.busy_until, QKind::busy_end, w.comp, wi, w.token);
    } else {
      finish_restore(wi, p.cause);
    }
  }

  void finish_restore(std::size_t wi, std::optional<std::uint64_t> cause) {
    auto& w = workers_[wi];
    settle(w);
    w.restoring = false;
    w.state = WorkerState::running;
    comps_[w.comp].failure_seq.reset();
    set_own_status(w.comp, Status::service_delivery, cause);
  }

  CheckpointStore& store_for(std::size_t inst, std::size_t wi) {
    auto it = stores_.find({inst, wi});
    if (it == stores_.end()) it = stores_.emplace(std::make_pair(inst, wi), CheckpointStore(model_.at(workers_[wi].comp).id)).first;
    return it->second;
  }

  /// Workers whose progress depends on component `c`.
  std::vector<std::size_t> affected_workers(std::size_t c) const {
    std::vector<std::size_t> out;
    if (worker_of_[c] >= 0) {
      out.push_back(static_cast<std::size_t>(worker_of_[c]));
      return out;
    }
    for (const auto* e : model_.consumers_of(model_.at(c).id)) {
      const auto d = model_.index_of(e->consumer);
      if (worker_of_[d] >= 0) out.push_back(static_cast<std::size_t>(worker_of_[d]));
    }
    if (!out.empty()) return out;
    for (int p = model_.at(c).parent; p >= 0; p = model_.at(static_cast<std::size_t>(p)).parent) {
      if (worker_of_[p] >= 0) {
        out.push_back(static_cast<std::size_t>(worker_of_[p]));
        break;
      }
    }
    return out;
  }

  void charge(std::size_t c, double cost_h) {
    for (auto wi : affected_workers(c)) make_busy(wi, cost_h);
  }

  // -------------------------------------------------------------------------
  // dispatch helpers

  bool matches(const PatternInstance& inst, const std::string& kind, std::size_t comp, const std::string& source) const {
    if (!inst.activation.kinds.count(kind)) return false;
    if (!inst.covers(model_.at(comp).id)) return false;
    if (!source.empty() && !inst.activation.sources.empty() && !inst.activation.sources.count(source)) return false;
    if (source.empty() && !inst.activation.sources.empty() && kind != "error" && kind != "failure") return false;
    return true;
  }

  std::string error_class(Detection d, Masking m, Origin o, Correction c) const {
    return to_string(ErrorDescriptor{d, m, o, c});
  }

  // -------------------------------------------------------------------------
  // event handlers

  void handle(const QEvent& ev) {
    switch (ev.kind) {
      case QKind::fault_arrival: on_fault_arrival(ev.comp, ev.aux); break;
      case QKind::activation: on_activation(ev.comp, ev.ref); break;
      case QKind::monitor_check: on_monitor_check(ev.aux, ev.comp, ev.ref); break;
      case QKind::false_alarm: on_false_alarm(ev.aux, ev.comp); break;
      case QKind::checkpoint_timer: on_checkpoint_timer(ev.aux); break;
      case QKind::predict_sample: on_predict_sample(ev.aux); break;
      case QKind::busy_end: on_busy_end(ev.aux, ev.ref); break;
      case QKind::repair_end: on_repair_end(ev.comp, ev.ref); break;
      case QKind::restart_ready: reconcile(); break;
      case QKind::maintenance_start: on_maintenance(ev.comp, true, ev.value); break;
      case QKind::maintenance_end: on_maintenance(ev.comp, false, 0.0); break;
      case QKind::readmit: on_readmit(ev.comp); break;
    }
  }

  void on_fault_arrival(std::size_t c, std::size_t k) {
    if (suppressed_.count({c, k})) return;
    const auto& src = model_.at(c).fault_sources[k];
    FaultInfo info{c, static_cast<int>(k), src.failure, src.multiplicity, src.mask_probability};
    comps_[c].predicted = false;
    introduce_fault(c, src.descriptor_template, std::nullopt, info, src.activation_delay_h.value_or(0.0));
  }

  void introduce_fault(std::size_t c, FaultDescriptor fd, std::optional<std::uint64_t> cause, const FaultInfo& info,
                       double delay) {
    std::string note = info.source >= 0 ? "source=" + std::to_string(info.source) : std::string("cascade");
    const bool inactive = !up(c);
    if (inactive) {
      if (comps_[c].isolated_by_prediction) {
        note += " inactive avoided";
        ++avoided_;
      } else {
        note += " inactive";
      }
    } else if (fd.activity == Activity::benign) {
      note += " benign";
    }
    const auto seq = record(RecordKind::fault, c, to_string(fd), cause, note);
    if (inactive || fd.activity == Activity::benign) return;
    faults_[seq] = info;
    const double at = fd.activity == Activity::dormant ? now_ + delay : now_;
    push(at, QKind::activation, c, 0, seq);
  }

  void on_activation(std::size_t c, std::uint64_t fault_seq) {
    if (!up(c)) return;  // the fault stays dormant in a component that is out of service
    const auto& info = faults_.at(fault_seq);
    const auto& frec = trace_[fault_seq];
    Event fault{fault_seq + 1, EventKind::fault, frec.t, frec.comp, parse_fault_descriptor(frec.cls), std::nullopt};
    const Event err = activate_fault(fault, now_);
    ErrorDescriptor ed = err.error();
    if (info.mask_probability > 0.0 && mask_rng(c).bernoulli(info.mask_probability)) {
      ed.masking = Masking::masked;
      record(RecordKind::error, c, to_string(ed), fault_seq, "masked");
      return;
    }
    const auto err_seq = record(RecordKind::error, c, to_string(ed), fault_seq, "multiplicity=" + std::to_string(info.multiplicity));
    handle_error(c, err_seq, ed, info, fault_seq);
  }

  /// Offers an error to instances in declaration order. Unhandled errors
  /// escalate to the source's failure class.
  void handle_error(std::size_t c, std::uint64_t err_seq, ErrorDescriptor ed, const FaultInfo& info,
                    std::uint64_t fault_seq) {
    for (std::size_t n = 0; n < cfg_.solution.size(); ++n) {
      const auto& inst = cfg_.solution[n];
      if (!matches(inst, "error", c, "")) continue;
      std::optional<Verdict> verdict;
      double cost = 0.0;
      std::string detail_note;
      auto& rng = inst_rng_[n];
      switch (inst.structure) {
        case Structure::nmr: {
          const auto scheme = inst.text("scheme");
          if (scheme == "secded") {
            if (info.multiplicity == 1) verdict = Verdict::corrected;
            else if (info.multiplicity == 2) verdict = Verdict::uncorrectable;
            detail_note = " scheme=secded bits=" + std::to_string(info.multiplicity);
          } else if (scheme == "checksum") {
            verdict = Verdict::corrected;
            cost = inst.num("cost_h");
          } else {
            const auto n_rep = static_cast<std::size_t>(inst.integer("replicas"));
            std::vector<std::optional<double>> outs(n_rep, 1.0);
            const auto bad = std::min<std::size_t>(static_cast<std::size_t>(info.multiplicity), n_rep);
            for (std::size_t r = 0; r < bad; ++r) outs[r] = 2.0 + static_cast<double>(r);
            const auto vote = nmr_execute<double>(outs, inst.num("tolerance"));
            verdict = vote.verdict == Verdict::agreed ? Verdict::corrected : vote.verdict;
            if (verdict == Verdict::corrected) {
              const auto mode = inst.text("mode");
              cost = mode == "warm" ? inst.num("warm_start_h") : mode == "cold" ? inst.num("cold_start_h") : 0.0;
            }
            detail_note = " replicas=" + std::to_string(n_rep) + " corrupted=" + std::to_string(bad);
          }
          break;
        }
        case Structure::nversion: {
          if (rng.bernoulli(inst.num("correlation"))) break;  // common-mode design fault escapes the vote
          const auto n_var = static_cast<std::size_t>(inst.integer("variants"));
          std::vector<VariantOutput<double>> outs(n_var);
          const auto lat = inst.params.at("latencies_h");
          for (std::size_t v = 0; v < n_var; ++v) {
            outs[v].value = v == 0 ? 2.0 : 1.0;
            outs[v].latency_h = v < lat.size() ? lat[v].get<double>() : 0.0;
          }
          const auto res = nversion_execute<double>(outs, inst.num("tolerance"));
          verdict = res.vote.verdict;
          cost = res.sync_overhead_h;
          detail_note = " variants=" + std::to_string(n_var);
          break;
        }
        case Structure::recovery_block: {
          if (!rng.bernoulli(inst.num("acceptance_coverage"))) break;
          const auto alternates = static_cast<std::size_t>(inst.integer("alternates"));
          const double p_alt = inst.num("alternate_failure_probability");
          std::vector<std::function<int()>> variants{[] { return 0; }};
          for (std::size_t a = 0; a < alternates; ++a) {
            const bool fails = rng.bernoulli(p_alt);
            variants.push_back([fails] { return fails ? 0 : 1; });
          }
          std::vector<double> costs(variants.size(), inst.num("variant_cost_h"));
          try {
            const auto res = recovery_block<int>(variants, [](const int& v) { return v == 1; }, costs);
            verdict = Verdict::corrected;
            cost = res.cost_h;
            detail_note = " executions=" + std::to_string(res.executions);
          } catch (const Error&) {
            verdict = Verdict::uncorrectable;
            cost = inst.num("variant_cost_h") * static_cast<double>(variants.size());
            detail_note = " executions=" + std::to_string(variants.size()) + " all-rejected";
          }
          break;
        }
        default: break;
      }
      if (!verdict) continue;
      if (*verdict == Verdict::corrected || *verdict == Verdict::agreed) {
        const auto fixed = record(RecordKind::error, c,
                                  error_class(Detection::detected, Masking::masked, ed.origin, Correction::corrected),
                                  err_seq, "by=" + inst.id + " verdict=corrected" + detail_note);
        record(RecordKind::detect, c, "true-positive", fixed, "by=" + inst.id);
        charge(c, cost);
        return;
      }
      const auto due = record(RecordKind::error, c,
                              error_class(Detection::detected, Masking::unmasked, ed.origin, Correction::uncorrected),
                              err_seq, "by=" + inst.id + " verdict=uncorrectable" + detail_note);
      const auto det = record(RecordKind::detect, c, "true-positive", due, "by=" + inst.id);
      charge(c, cost);
      DetectCtx ctx{c, inst.id, det, due, false};
      if (dispatch_detect(ctx) == Outcome::handled) return;
      FailureDescriptor fd = info.failure;
      fd.detection = Detection::detected;
      escalate(c, due, fd, fault_seq, "unhandled due");
      return;
    }
    escalate(c, err_seq, info.failure, fault_seq, "unhandled");
  }

  void escalate(std::size_t c, std::uint64_t err_seq, FailureDescriptor fd, std::uint64_t fault_seq, const std::string& note) {
    const auto seq = record(RecordKind::failure, c, to_string(fd), err_seq, note);
    handle_failure(c, seq, fd, fault_seq);
  }

  void handle_failure(std::size_t c, std::uint64_t fail_seq, const FailureDescriptor& fd, std::uint64_t fault_seq) {
    if (fd.detection == Detection::undetected && fd.severity != Severity::complete) {
      ++sdc_;  // incorrect output delivered silently
      return;
    }
    if (comps_[c].failure_seq) return;
    comps_[c].failure_seq = fail_seq;
    comps_[c].failure = fd;
    comps_[c].root_fault = fault_seq;
    if (worker_of_[c] >= 0) {
      auto& w = workers_[static_cast<std::size_t>(worker_of_[c])];
      worker_down(static_cast<std::size_t>(worker_of_[c]));
      w.pending.reset();
    }
    comps_[c].own = Status::unscheduled_outage;
    refresh_status(c, fail_seq);

    // Cascade along service edges.
    for (const auto* e : model_.consumers_of(model_.at(c).id)) {
      const auto d = model_.index_of(e->consumer);
      if (e->semantics == Composition::redundant) {
        bool alternative = false;
        for (const auto* p : model_.providers_of(e->consumer)) {
          if (p->semantics == Composition::redundant && p->provider != model_.at(c).id && up(model_.index_of(p->provider))) {
            alternative = true;
          }
        }
        if (alternative) continue;
      }
      const auto repro = fd.persistence == Persistence::permanent ? Reproducibility::hard : Reproducibility::soft;
      FaultInfo info{d, -1, fd, 1, 0.0};
      introduce_fault(d, FaultDescriptor{Activity::dormant, fd.persistence, repro}, fail_seq, info, 0.0);
    }

    // Detection.
    bool monitored = false;
    for (std::size_t n = 0; n < cfg_.solution.size(); ++n) {
      const auto& inst = cfg_.solution[n];
      if (inst.structure != Structure::monitoring || !matches(inst, "failure", c, "")) continue;
      monitored = true;
      const double latency = inst.has("latency_h") ? inst.num("latency_h") : inst.num("interval_h");
      push(now_ + latency, QKind::monitor_check, c, n, fail_seq);
    }
    if (!monitored && fd.detection == Detection::detected) {
      const auto det = record(RecordKind::detect, c, "true-positive", fail_seq, "by=self");
      recover(DetectCtx{c, "self", det, std::nullopt, false});
    }
    reconcile();
  }

  void on_monitor_check(std::size_t n, std::size_t c, std::uint64_t fail_seq) {
    if (comps_[c].failure_seq != fail_seq) return;
    if (detected_.count(fail_seq)) return;
    const auto& inst = cfg_.solution[n];
    auto& rng = inst_rng_[n];
    if (rng.bernoulli(inst.num("miss_rate"))) {
      record(RecordKind::detect, c, "false-negative", fail_seq, "by=" + inst.id);
      push(now_ + inst.num("interval_h"), QKind::monitor_check, c, n, fail_seq);
      return;
    }
    detected_.insert(fail_seq);
    const auto det = record(RecordKind::detect, c, "true-positive", fail_seq, "by=" + inst.id);
    const double f = inst.num("false_positive_rate");
    for (std::size_t k = 1; f > 0.0 && rng.bernoulli(f); ++k) {
      push(now_ + static_cast<double>(k) * inst.num("interval_h"), QKind::false_alarm, c, n);
    }
    if (inst.flag("suppress_on_diagnosis") && comps_[c].failure.persistence == Persistence::permanent) {
      suppress_root(comps_[c].root_fault);
    }
    recover(DetectCtx{c, inst.id, det, std::nullopt, false});
  }

  void suppress_root(std::optional<std::uint64_t> fault_seq) {
    // Walk to the originating fault record and disable its source.
    std::optional<std::uint64_t> cur = fault_seq;
    while (cur) {
      auto it = faults_.find(*cur);
      if (it != faults_.end() && it->second.source >= 0) {
        suppressed_.insert({it->second.comp, static_cast<std::size_t>(it->second.source)});
        return;
      }
      cur = trace_[*cur].cause;
      while (cur && trace_[*cur].kind != RecordKind::fault) cur = trace_[*cur].cause;
    }
  }

  void on_false_alarm(std::size_t n, std::size_t c) {
    const auto det = record(RecordKind::detect, c, "false-positive", std::nullopt, "by=" + cfg_.solution[n].id);
    recover(DetectCtx{c, cfg_.solution[n].id, det, std::nullopt, true});
  }

  /// Offers a detection to matching instances; returns whether one acted.
  Outcome dispatch_detect(const DetectCtx& ctx) {
    for (std::size_t n = 0; n < cfg_.solution.size(); ++n) {
      const auto& inst = cfg_.solution[n];
      if (!matches(inst, "detect", ctx.comp, ctx.source)) continue;
      if (inst.id == ctx.source) continue;
      if (respond(n, ctx) == Outcome::handled) return Outcome::handled;
    }
    return Outcome::unhandled;
  }

  /// Recovery entry point for a detected failure (or a false alarm).
  void recover(const DetectCtx& ctx) {
    if (dispatch_detect(ctx) == Outcome::handled) return;
    if (ctx.spurious) return;
    const std::size_t c = ctx.comp;
    if (!comps_[c].failure_seq) return;
    const double repair = sample_repair(c);
    record(RecordKind::respond, c, "-", ctx.detect_seq, "inst=repair action=repair repair_h=" + format_number(repair));
    schedule_recovery(c, RestartMode::scratch, -1, repair, 0.0, ctx.detect_seq);
  }

  void schedule_recovery(std::size_t c, RestartMode mode, int instance, double delay_h, double cost_h,
                         std::optional<std::uint64_t> cause) {
    if (worker_of_[c] >= 0) {
      auto& w = workers_[static_cast<std::size_t>(worker_of_[c])];
      w.pending = PendingRestart{mode, now_ + delay_h, cost_h, instance, cause, false};
      if (delay_h > 0.0) push(now_ + delay_h, QKind::restart_ready, c, 0);
      reconcile();
    } else {
      push(now_ + delay_h + cost_h, QKind::repair_end, c, 0, *comps_[c].failure_seq);
    }
  }

  void on_repair_end(std::size_t c, std::uint64_t fail_seq) {
    if (comps_[c].failure_seq != fail_seq) return;
    comps_[c].failure_seq.reset();
    set_own_status(c, Status::service_delivery, fail_seq);
  }

  Outcome respond(std::size_t n, const DetectCtx& ctx) {
    const auto& inst = cfg_.solution[n];
    const std::size_t c = ctx.comp;
    const bool failed = comps_[c].failure_seq.has_value();
    const int wi = worker_of_[c];
    const bool is_worker = wi >= 0;
    const auto& fd = comps_[c].failure;
    auto respond_note = [&](const std::string& action) {
      return record(RecordKind::respond, c, "-", ctx.detect_seq, "inst=" + inst.id + " action=" + action);
    };

    switch (inst.structure) {
      case Structure::rollback:
      case Structure::rollforward: {
        if (!is_worker || ctx.due_error) return Outcome::unhandled;
        const auto mode = inst.structure == Structure::rollback ? RestartMode::checkpoint : RestartMode::forward;
        double cost = inst.num("restore_cost_h");
        if (mode == RestartMode::forward) cost += inst.num("rederive_h");
        if (ctx.spurious) {
          auto& w = workers_[static_cast<std::size_t>(wi)];
          if (w.state != WorkerState::running) return Outcome::unhandled;
          respond_note(std::string(to_string(inst.structure)) + " spurious");
          settle(w);
          w.failed_at = now_;
          w.state = WorkerState::down;
          ++w.token;
          w.pending = PendingRestart{mode, now_, cost, static_cast<int>(n), ctx.detect_seq, true};
          begin_restart(static_cast<std::size_t>(wi));
          return Outcome::handled;
        }
        if (!failed) return Outcome::unhandled;
        const double repair = fd.persistence == Persistence::permanent ? sample_repair(c) : 0.0;
        respond_note(std::string(to_string(inst.structure)) + " repair_h=" + format_number(repair));
        schedule_recovery(c, mode, static_cast<int>(n), repair, cost, ctx.detect_seq);
        return Outcome::handled;
      }
      case Structure::reinitialization: {
        if (!failed || ctx.spurious || ctx.due_error) return Outcome::unhandled;
        respond_note("reinitialize");
        schedule_recovery(c, RestartMode::scratch, static_cast<int>(n), 0.0, inst.num("reboot_h"), ctx.detect_seq);
        return Outcome::handled;
      }
      case Structure::rejuvenation: {
        if (!failed || ctx.spurious || ctx.due_error) return Outcome::unhandled;
        if (fd.persistence == Persistence::permanent) {
          respond_note("rejuvenate refused=persistent");
          return Outcome::unhandled;
        }
        respond_note("rejuvenate");
        schedule_recovery(c, RestartMode::preserve, static_cast<int>(n), 0.0, inst.num("cost_h"), ctx.detect_seq);
        return Outcome::handled;
      }
      case Structure::restructure: {
        const auto action = inst.text("action");
        if (action == "relay") {
          if (!ctx.due_error) return Outcome::unhandled;
          const auto seq = respond_note("relay");
          DetectCtx fwd = ctx;
          fwd.source = inst.id;
          fwd.detect_seq = seq;
          return dispatch_detect(fwd);
        }
        if (!failed || ctx.spurious || ctx.due_error || is_worker) return Outcome::unhandled;
        return isolate(n, c, ctx.detect_seq, action == "migrate") ? Outcome::handled : Outcome::unhandled;
      }
      case Structure::nmr: {
        if (inst.text("scheme") != "checksum" || !ctx.due_error) return Outcome::unhandled;
        if (inst_rng_[n].bernoulli(inst.num("failure_probability"))) {
          respond_note("checksum-correct failed=abort");
          return Outcome::unhandled;
        }
        const auto& due = trace_[*ctx.due_error];
        const auto ed = parse_error_descriptor(due.cls);
        const auto seq = record(RecordKind::error, c,
                                error_class(Detection::detected, Masking::masked, ed.origin, Correction::corrected),
                                *ctx.due_error, "by=" + inst.id + " verdict=corrected scheme=checksum");
        record(RecordKind::respond, c, "-", seq, "inst=" + inst.id + " action=checksum-correct");
        charge(c, inst.num("cost_h"));
        return Outcome::handled;
      }
      default: return Outcome::unhandled;
    }
  }

  /// Isolates `c`, optionally migrating its dependents first.
  bool isolate(std::size_t n, std::size_t c, std::optional<std::uint64_t> cause, bool migrate) {
    const auto& inst = cfg_.solution[n];
    try {
      auto res = restructure(model_, model_.at(c).id, migrate);
      model_ = std::move(res.model);
      std::string note = "inst=" + inst.id + " action=" + (migrate ? "migrate" : "isolate") +
                         " factor=" + format_number(res.factor);
      if (res.target) note += " target=" + *res.target;
      for (const auto& m : res.moved) note += " moved=" + m;
      record(RecordKind::respond, c, "-", cause, note);
      record(RecordKind::status, c, "-", cause, "excluded");
      if (model_.at(c).parent >= 0) refresh_status(static_cast<std::size_t>(model_.at(c).parent), cause);
      for (const auto& m : res.moved) {
        const auto d = model_.index_of(m);
        if (worker_of_[d] >= 0) make_busy(static_cast<std::size_t>(worker_of_[d]), inst.num("migration_cost_h"));
      }
      reconcile();
      return true;
    } catch (const Error& e) {
      record(RecordKind::respond, c, "-", cause, "inst=" + inst.id + " action=isolate refused=" + std::string(to_string(e.code())));
      return false;
    }
  }

  void on_checkpoint_timer(std::size_t n) {
    const auto& inst = cfg_.solution[n];
    for (std::size_t wi = 0; wi < workers_.size(); ++wi) {
      auto& w = workers_[wi];
      if (!inst.covers(model_.at(w.comp).id) || w.state != WorkerState::running) continue;
      settle(w);
      double units = 0.0;
      for (const auto& [aspect, size] : model_.at(w.comp).state_profile) {
        if (inst.domain.aspects.count(aspect)) units += size;
      }
      auto& store = store_for(n, wi);
      const double write = inst.num("write_cost_h") + inst.num("size_cost_h") * units;
      const auto ck = checkpoint_create(store, now_, w.progress, units, inst.num("restore_cost_h"));
      record(RecordKind::checkpoint, w.comp, "-", std::nullopt,
             "inst=" + inst.id + " id=" + std::to_string(ck.id) + " progress=" + format_number(w.progress) +
                 " write_h=" + format_number(write));
      make_busy(wi, write);
    }
    push(now_ + inst.num("interval_h"), QKind::checkpoint_timer, 0, n);
  }

  double sensor(std::size_t c, double noise_sd, RandomStream& rng) const {
    double value = 0.0;
    bool any = false;
    double baseline = 0.0;
    auto it = precursors_.find(c);
    if (it != precursors_.end()) {
      for (const auto& [tf, p] : it->second) {
        if (!any) baseline = p.baseline;
        any = true;
        const double start = tf - p.lead_h;
        if (now_ >= start && now_ <= tf) {
          value = std::max(value, p.baseline + (p.peak - p.baseline) * (now_ - start) / p.lead_h);
        }
      }
    }
    value = std::max(value, baseline);
    return value + noise_sd * rng.normal();
  }

  void on_predict_sample(std::size_t n) {
    const auto& inst = cfg_.solution[n];
    auto& rng = inst_rng_[n];
    const auto window = static_cast<std::size_t>(inst.integer("window"));
    for (std::size_t c = 0; c < model_.size(); ++c) {
      if (!inst.covers(model_.at(c).id) || model_.at(c).excluded || !model_.at(c).operational()) continue;
      double noise = 0.0, max_lead = 0.0;
      if (auto it = precursors_.find(c); it != precursors_.end() && !it->second.empty()) {
        noise = it->second.front().second.noise;
        for (const auto& [tf, p] : it->second) max_lead = std::max(max_lead, p.lead_h);
      }
      auto& hist = history_[{n, c}];
      hist.push_back({now_, sensor(c, noise, rng)});
      if (hist.size() > window) hist.erase(hist.begin());
      if (hist.size() < 2 || comps_[c].predicted) continue;
      auto pred = prediction_forecast(model_.at(c).id, hist, inst.num("threshold"), inst.num("margin_h"), window);
      if (!pred) continue;
      comps_[c].predicted = true;
      bool real = false;
      if (auto it = precursors_.find(c); it != precursors_.end()) {
        for (const auto& [tf, p] : it->second) {
          if (tf >= now_ && tf <= now_ + max_lead + inst.num("margin_h")) real = true;
        }
      }
      const auto seq = record(RecordKind::predict, c, real ? "true-positive" : "false-positive", std::nullopt,
                              "by=" + inst.id + " crossing=" + format_number(pred->crossing_time) +
                                  " lead=" + format_number(pred->lead_h));
      for (std::size_t m = 0; m < cfg_.solution.size(); ++m) {
        const auto& r = cfg_.solution[m];
        if (r.structure != Structure::restructure || !matches(r, "predict", c, inst.id)) continue;
        if (r.text("action") == "relay") continue;
        if (isolate(m, c, seq, r.text("action") == "migrate")) {
          comps_[c].isolated_by_prediction = true;
          push(now_ + max_lead + inst.num("margin_h") + sample_repair(c), QKind::readmit, c, 0, seq);
          break;
        }
      }
    }
    push(now_ + inst.num("sample_interval_h"), QKind::predict_sample, 0, n);
  }

  /// A proactively isolated component returns as an empty spare.
  void on_readmit(std::size_t c) {
    if (!model_.at(c).excluded) return;
    model_ = readmit(model_, model_.at(c).id).model;
    auto& comp = model_.mutable_at(c);
    comp.spare = true;
    comp.utilization = 0.0;
    comps_[c].isolated_by_prediction = false;
    comps_[c].predicted = false;
    record(RecordKind::status, c, "-", std::nullopt, "readmitted");
    refresh_status(c, std::nullopt);
    reconcile();
  }

  void on_busy_end(std::size_t wi, std::uint64_t token) {
    auto& w = workers_[wi];
    if (w.token != token || w.state != WorkerState::busy || w.busy_until > now_) return;
    if (w.restoring) {
      finish_restore(wi, std::nullopt);
      return;
    }
    settle(w);
    w.state = runnable(w.comp) ? WorkerState::running : WorkerState::paused;
  }

  void on_maintenance(std::size_t c, bool start, double duration) {
    if (start) {
      if (comps_[c].own != Status::service_delivery) return;
      set_own_status(c, Status::scheduled_outage, std::nullopt);
      push(now_ + duration, QKind::maintenance_end, c, 0);
    } else if (comps_[c].own == Status::scheduled_outage) {
      set_own_status(c, Status::service_delivery, std::nullopt);
    }
  }

  void finish() {
    now_ = cfg_.horizon_h;
    double progress = 0.0, lost = 0.0, overhead = 0.0, idle = 0.0;
    for (auto& w : workers_) {
      settle(w);
      progress += w.progress;
      lost += w.lost;
      overhead += w.overhead;
      idle += w.idle;
    }
    for (std::size_t i = 0; i < model_.size(); ++i) {
      auto& clk = model_.mutable_at(i).clock;
      SystemModel::accrue(clk, now_);
    }
    record(RecordKind::status, 0, "-", std::nullopt,
           "end progress=" + format_number(progress) + " lost=" + format_number(lost) +
               " overhead=" + format_number(overhead) + " idle=" + format_number(idle) +
               " sdc=" + std::to_string(sdc_) + " avoided=" + std::to_string(avoided_));
  }

  const SimConfig& cfg_;
  SystemModel model_;
  SolutionVerdict verdict_;
  double now_ = 0.0;
  std::priority_queue<QEvent, std::vector<QEvent>, std::greater<>> queue_;
  std::uint64_t next_q_ = 0;
  std::vector<TraceRecord> trace_;
  std::vector<CompState> comps_;
  std::vector<Worker> workers_;
  std::vector<int> worker_of_;
  std::vector<RandomStream> inst_rng_;
  std::map<std::size_t, RandomStream> repair_rng_, mask_rng_;
  std::map<std::uint64_t, FaultInfo> faults_;
  std::map<std::size_t, std::vector<std::pair<double, Precursor>>> precursors_;
  std::map<std::pair<std::size_t, std::size_t>, CheckpointStore> stores_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Sample>> history_;
  std::set<std::pair<std::size_t, std::size_t>> suppressed_;
  std::set<std::uint64_t> detected_;
  std::size_t sdc_ = 0, avoided_ = 0;
};

}  // namespace detail

/// Runs one simulation. Deterministic in (config, seed).
inline SimResult run(const SimConfig& cfg) {
  if (!(cfg.horizon_h > 0.0)) throw Error(ErrorCode::ConfigError, "horizon must be > 0");
  if (cfg.model.size() == 0) throw Error(ErrorCode::ConfigError, "model has no components");
  return detail::Engine(cfg).run();
}

/// Runs one simulation per seed on a worker pool; results are ordered by seed.
inline std::vector<SimResult> run_sweep(const SimConfig& base, const std::vector<std::uint64_t>& seeds,
                                        unsigned threads = 0) {
  std::vector<SimResult> results(seeds.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(seeds.size(), 1)));
  std::vector<std::exception_ptr> errors(seeds.size());
  auto work = [&](unsigned id) {
    for (std::size_t i = id; i < seeds.size(); i += threads) {
      try {
        SimConfig cfg = base;
        cfg.seed = seeds[i];
        results[i] = run(cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

/// N serial components, each failing with probability p over the horizon.
inline SimConfig independent_components_config(std::size_t n, double p, double horizon_h = 1.0) {
  if (p < 0.0 || p >= 1.0) throw Error(ErrorCode::InvalidArgument, "p must lie in [0,1)");
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "need at least one component");
  Json children = Json::array();
  const double rate = -std::log1p(-p) / horizon_h;
  for (std::size_t i = 0; i < n; ++i) {
    Json c{{"id", "c" + std::to_string(i)}};
    if (rate > 0.0) {
      c["fault_sources"] = Json::array({Json{{"classes", "active-permanent-hard"},
                                             {"dist", "exponential"},
                                             {"params", {{"rate", rate}}},
                                             {"failure", "undetected-permanent-complete"}}});
    }
    children.push_back(c);
  }
  Json doc{{"system", {{"id", "system"}, {"compose", "serial"}, {"children", children}}},
           {"sim", {{"horizon_h", horizon_h}}}};
  return parse_config(doc);
}

struct ReliabilityObservation {
  std::size_t trials = 0;
  std::size_t successes = 0;
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// Fraction of runs in which the full system never left service.
inline ReliabilityObservation observe_system_reliability(const SimConfig& base, std::size_t trials) {
  ReliabilityObservation o;
  o.trials = trials;
  for (std::size_t i = 0; i < trials; ++i) {
    SimConfig cfg = base;
    cfg.seed = base.seed + i;
    const auto res = run(cfg);
    if (res.report.root_status.t_ud == 0.0) ++o.successes;
  }
  o.estimate = trials ? static_cast<double>(o.successes) / static_cast<double>(trials) : 0.0;
  o.standard_error = trials ? std::sqrt(o.estimate * (1.0 - o.estimate) / static_cast<double>(trials)) : 0.0;
  return o;
}

inline ReliabilityObservation observe_system_reliability(std::size_t n, double p, std::size_t trials,
                                                         std::uint64_t seed) {
  auto cfg = independent_components_config(n, p);
  cfg.seed = seed;
  return observe_system_reliability(cfg, trials);
}

}  // namespace resilsim
