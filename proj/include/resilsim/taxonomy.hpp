#pragma once

// Fault / error / failure classes, their common-term labels, and the
// causality DAG that links them.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "resilsim/error.hpp"

namespace resilsim {

enum class Activity { benign, dormant, active };
enum class Persistence { permanent, transient, intermittent };
enum class Reproducibility { hard, soft };
enum class Detection { undetected, detected };
enum class Masking { unmasked, masked };
enum class Origin { hard, soft };
enum class Correction { uncorrected, corrected };
enum class Severity { complete, partial, byzantine };
enum class EventKind { fault, error, failure };
enum class ConsumerSemantics { annihilating, propagating };

constexpr std::string_view to_string(Activity v) {
  constexpr std::string_view n[] = {"benign", "dormant", "active"};
  return n[static_cast<int>(v)];
}
constexpr std::string_view to_string(Persistence v) {
  constexpr std::string_view n[] = {"permanent", "transient", "intermittent"};
  return n[static_cast<int>(v)];
}
constexpr std::string_view to_string(Reproducibility v) {
  constexpr std::string_view n[] = {"hard", "soft"};
  return n[static_cast<int>(v)];
}
constexpr std::string_view to_string(Detection v) {
  constexpr std::string_view n[] = {"undetected", "detected"};
  return n[static_cast<int>(v)];
}
constexpr std::string_view to_string(Masking v) {
  constexpr std::string_view n[] = {"unmasked", "masked"};
  return n[static_cast<int>(v)];
}
constexpr std::string_view to_string(Origin v) {
  constexpr std::string_view n[] = {"hard", "soft"};
  return n[static_cast<int>(v)];
}
constexpr std::string_view to_string(Correction v) {
  constexpr std::string_view n[] = {"uncorrected", "corrected"};
  return n[static_cast<int>(v)];
}
constexpr std::string_view to_string(Severity v) {
  constexpr std::string_view n[] = {"complete", "partial", "byzantine"};
  return n[static_cast<int>(v)];
}
constexpr std::string_view to_string(EventKind v) {
  constexpr std::string_view n[] = {"fault", "error", "failure"};
  return n[static_cast<int>(v)];
}

/// Parses a lowercase enum label; returns nullopt for unknown labels.
template <typename E, std::size_t N>
std::optional<E> parse_enum(std::string_view text) {
  for (std::size_t i = 0; i < N; ++i) {
    if (to_string(static_cast<E>(i)) == text) return static_cast<E>(i);
  }
  return std::nullopt;
}

struct FaultDescriptor {
  Activity activity = Activity::dormant;
  Persistence persistence = Persistence::transient;
  Reproducibility reproducibility = Reproducibility::soft;

  friend bool operator==(const FaultDescriptor&, const FaultDescriptor&) = default;
};

struct ErrorDescriptor {
  Detection detection = Detection::undetected;
  Masking masking = Masking::unmasked;
  Origin origin = Origin::soft;
  Correction correction = Correction::uncorrected;

  /// A corrected error is by definition a detected masked error.
  bool well_formed() const {
    return correction == Correction::uncorrected ||
           (detection == Detection::detected && masking == Masking::masked);
  }

  friend bool operator==(const ErrorDescriptor&, const ErrorDescriptor&) = default;
};

struct FailureDescriptor {
  Detection detection = Detection::detected;
  Persistence persistence = Persistence::permanent;
  Severity severity = Severity::complete;

  friend bool operator==(const FailureDescriptor&, const FailureDescriptor&) = default;
};

using Descriptor = std::variant<FaultDescriptor, ErrorDescriptor, FailureDescriptor>;

inline std::string to_string(const FaultDescriptor& d) {
  return std::string(to_string(d.activity)) + "-" + std::string(to_string(d.persistence)) + "-" +
         std::string(to_string(d.reproducibility));
}
inline std::string to_string(const ErrorDescriptor& d) {
  return std::string(to_string(d.detection)) + "-" + std::string(to_string(d.masking)) + "-" +
         std::string(to_string(d.origin)) + "-" + std::string(to_string(d.correction));
}
inline std::string to_string(const FailureDescriptor& d) {
  return std::string(to_string(d.detection)) + "-" + std::string(to_string(d.persistence)) + "-" +
         std::string(to_string(d.severity));
}
inline std::string to_string(const Descriptor& d) {
  return std::visit([](const auto& x) { return to_string(x); }, d);
}

namespace detail {

inline std::vector<std::string_view> split_tuple(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find('-', start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename E, std::size_t N>
E parse_axis(std::string_view part, std::string_view tuple) {
  auto v = parse_enum<E, N>(part);
  if (!v) {
    throw Error(ErrorCode::InvalidArgument,
                "unknown class '" + std::string(part) + "' in '" + std::string(tuple) + "'");
  }
  return *v;
}

}  // namespace detail

inline FaultDescriptor parse_fault_descriptor(std::string_view text) {
  auto p = detail::split_tuple(text);
  if (p.size() != 3) throw Error(ErrorCode::InvalidArgument, "fault tuple needs 3 axes: " + std::string(text));
  return {detail::parse_axis<Activity, 3>(p[0], text), detail::parse_axis<Persistence, 3>(p[1], text),
          detail::parse_axis<Reproducibility, 2>(p[2], text)};
}

/// Accepts the full 4-axis form, or the 3-axis form with correction implied.
inline ErrorDescriptor parse_error_descriptor(std::string_view text) {
  auto p = detail::split_tuple(text);
  if (p.size() != 3 && p.size() != 4) {
    throw Error(ErrorCode::InvalidArgument, "error tuple needs 3 or 4 axes: " + std::string(text));
  }
  ErrorDescriptor d{detail::parse_axis<Detection, 2>(p[0], text), detail::parse_axis<Masking, 2>(p[1], text),
                    detail::parse_axis<Origin, 2>(p[2], text), Correction::uncorrected};
  if (p.size() == 4) d.correction = detail::parse_axis<Correction, 2>(p[3], text);
  if (!d.well_formed()) {
    throw Error(ErrorCode::InvalidArgument, "corrected error must be detected and masked: " + std::string(text));
  }
  return d;
}

inline FailureDescriptor parse_failure_descriptor(std::string_view text) {
  auto p = detail::split_tuple(text);
  if (p.size() != 3) throw Error(ErrorCode::InvalidArgument, "failure tuple needs 3 axes: " + std::string(text));
  return {detail::parse_axis<Detection, 2>(p[0], text), detail::parse_axis<Persistence, 3>(p[1], text),
          detail::parse_axis<Severity, 3>(p[2], text)};
}

using EventId = std::uint64_t;

struct Event {
  EventId id = 0;  // 0 = not yet assigned
  EventKind kind = EventKind::fault;
  double time = 0.0;
  std::string component;
  Descriptor descriptor = FaultDescriptor{};
  std::optional<EventId> cause;

  const FaultDescriptor& fault() const { return std::get<FaultDescriptor>(descriptor); }
  const ErrorDescriptor& error() const { return std::get<ErrorDescriptor>(descriptor); }
  const FailureDescriptor& failure() const { return std::get<FailureDescriptor>(descriptor); }

  friend bool operator==(const Event&, const Event&) = default;
};

inline Event make_fault(double time, std::string component, FaultDescriptor d,
                        std::optional<EventId> cause = std::nullopt) {
  return Event{0, EventKind::fault, time, std::move(component), d, cause};
}

// ---------------------------------------------------------------------------
// Propagation operations

inline Origin origin_for(Persistence p) {
  return p == Persistence::permanent ? Origin::hard : Origin::soft;
}

/// Fault activation: the fault becomes an undetected, unmasked error.
inline Event activate_fault(const Event& fault, double trigger_time) {
  if (fault.kind != EventKind::fault) throw Error(ErrorCode::InvalidArgument, "activate_fault needs a fault event");
  const auto& fd = fault.fault();
  if (fd.activity == Activity::benign) {
    throw Error(ErrorCode::BenignFault, "benign fault in '" + fault.component + "' never activates");
  }
  if (trigger_time < fault.time) {
    throw Error(ErrorCode::InvalidArgument, "trigger precedes fault occurrence");
  }
  ErrorDescriptor ed{Detection::undetected, Masking::unmasked, origin_for(fd.persistence), Correction::uncorrected};
  return Event{0, EventKind::error, trigger_time, fault.component, ed, fault.id};
}

/// Applies the consuming operation's semantics to an error. Masking is final.
inline ErrorDescriptor mask_check(const Event& error, ConsumerSemantics consumer) {
  if (error.kind != EventKind::error) throw Error(ErrorCode::InvalidArgument, "mask_check needs an error event");
  ErrorDescriptor d = error.error();
  if (consumer == ConsumerSemantics::annihilating) d.masking = Masking::masked;
  return d;
}

inline Event escalate_to_failure(const Event& error, Severity severity, Detection detection,
                                 Persistence persistence) {
  if (error.kind != EventKind::error) {
    throw Error(ErrorCode::InvalidArgument, "escalate_to_failure needs an error event");
  }
  const auto& ed = error.error();
  if (ed.masking == Masking::masked || ed.correction == Correction::corrected) {
    throw Error(ErrorCode::MaskedError, "masked or corrected errors do not reach the service interface");
  }
  FailureDescriptor fd{detection, persistence, severity};
  return Event{0, EventKind::failure, error.time, error.component, fd, error.id};
}

/// One dormant external fault per dependent of the failed component.
inline std::vector<Event> cascade(const Event& failure, const std::vector<std::string>& dependents) {
  if (failure.kind != EventKind::failure) throw Error(ErrorCode::InvalidArgument, "cascade needs a failure event");
  std::vector<Event> out;
  out.reserve(dependents.size());
  const auto persistence = failure.failure().persistence;
  const auto repro = persistence == Persistence::permanent ? Reproducibility::hard : Reproducibility::soft;
  for (const auto& dep : dependents) {
    out.push_back(make_fault(failure.time, dep, FaultDescriptor{Activity::dormant, persistence, repro}, failure.id));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Common terms

enum class CommonTerm {
  latent_fault,
  solid_fault,
  elusive_fault,
  ue,
  latent_error,
  silent_error,
  sdc,
  de,
  due,
  dce,
  fail_stop,
};

constexpr std::string_view to_string(CommonTerm t) {
  constexpr std::string_view n[] = {"latent fault", "solid fault",  "elusive fault", "UE",  "latent error", "silent error",
                                    "SDC",          "DE",           "DUE",           "DCE", "fail-stop"};
  return n[static_cast<int>(t)];
}

inline std::vector<CommonTerm> common_terms(const FaultDescriptor& d) {
  std::vector<CommonTerm> out;
  if (d.activity == Activity::dormant) out.push_back(CommonTerm::latent_fault);
  out.push_back(d.reproducibility == Reproducibility::hard ? CommonTerm::solid_fault : CommonTerm::elusive_fault);
  return out;
}

inline std::vector<CommonTerm> common_terms(const ErrorDescriptor& d) {
  std::vector<CommonTerm> out;
  if (d.detection == Detection::undetected) {
    out.insert(out.end(), {CommonTerm::ue, CommonTerm::latent_error, CommonTerm::silent_error});
    if (d.masking == Masking::unmasked) out.push_back(CommonTerm::sdc);
  } else {
    out.push_back(CommonTerm::de);
    if (d.masking == Masking::unmasked) out.push_back(CommonTerm::due);
    if (d.correction == Correction::corrected) out.push_back(CommonTerm::dce);
  }
  return out;
}

inline std::vector<CommonTerm> common_terms(const FailureDescriptor& d) {
  if (d.persistence == Persistence::permanent && d.severity == Severity::complete) return {CommonTerm::fail_stop};
  return {};
}

inline std::vector<CommonTerm> common_terms(const Descriptor& d) {
  return std::visit([](const auto& x) { return common_terms(x); }, d);
}

inline bool has_term(const Descriptor& d, CommonTerm t) {
  auto terms = common_terms(d);
  return std::find(terms.begin(), terms.end(), t) != terms.end();
}

// ---------------------------------------------------------------------------
// Causality chains

inline bool allowed_edge(EventKind parent, EventKind child) {
  return (parent == EventKind::fault && child == EventKind::error) ||
         (parent == EventKind::error && child == EventKind::error) ||
         (parent == EventKind::error && child == EventKind::failure) ||
         (parent == EventKind::failure && child == EventKind::fault);
}

/// The realized fault-error-failure DAG. Edges are implied by Event::cause.
class CausalityChain {
 public:
  /// Adds an event, assigning the next free id when the event has none.
  EventId add(Event e) {
    if (e.id == 0) e.id = next_id_;
    next_id_ = std::max(next_id_, e.id + 1);
    index_[e.id] = events_.size();
    events_.push_back(std::move(e));
    return events_.back().id;
  }

  const std::vector<Event>& events() const { return events_; }
  const Event* find(EventId id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &events_[it->second];
  }
  std::size_t size() const { return events_.size(); }

 private:
  std::vector<Event> events_;
  std::unordered_map<EventId, std::size_t> index_;
  EventId next_id_ = 1;
};

enum class ViolationKind {
  dangling_cause,
  cycle,
  kind_order,
  orphan_error,
  orphan_failure,
  time_regression,
  benign_parent,
  origin_mismatch,
  malformed_descriptor,
};

constexpr std::string_view to_string(ViolationKind v) {
  constexpr std::string_view n[] = {"dangling cause",  "cycle",        "kind-order violation",
                                    "orphan error",    "orphan failure", "time regression",
                                    "benign parent",   "origin mismatch", "malformed descriptor"};
  return n[static_cast<int>(v)];
}

struct ChainViolation {
  ViolationKind kind;
  EventId event;
  std::string message;
};

struct ChainVerdict {
  std::vector<ChainViolation> violations;
  bool ok() const { return violations.empty(); }
  bool has(ViolationKind k) const {
    return std::any_of(violations.begin(), violations.end(), [k](const auto& v) { return v.kind == k; });
  }
};

inline ChainVerdict validate_chain(const CausalityChain& chain) {
  ChainVerdict verdict;
  auto flag = [&](ViolationKind k, const Event& e, std::string msg) {
    verdict.violations.push_back({k, e.id, std::move(msg)});
  };

  for (const auto& e : chain.events()) {
    const bool kind_matches = (e.kind == EventKind::fault && std::holds_alternative<FaultDescriptor>(e.descriptor)) ||
                              (e.kind == EventKind::error && std::holds_alternative<ErrorDescriptor>(e.descriptor)) ||
                              (e.kind == EventKind::failure && std::holds_alternative<FailureDescriptor>(e.descriptor));
    if (!kind_matches || (e.kind == EventKind::error && !e.error().well_formed())) {
      flag(ViolationKind::malformed_descriptor, e, "descriptor does not match event kind");
      continue;
    }
    if (!e.cause) continue;
    const Event* parent = chain.find(*e.cause);
    if (!parent) {
      flag(ViolationKind::dangling_cause, e, "cause " + std::to_string(*e.cause) + " not in chain");
      continue;
    }
    if (parent->time > e.time) flag(ViolationKind::time_regression, e, "cause occurs after its effect");
    if (!allowed_edge(parent->kind, e.kind)) {
      flag(ViolationKind::kind_order, e,
           std::string(to_string(parent->kind)) + " -> " + std::string(to_string(e.kind)));
    }
    if (parent->kind == EventKind::fault && e.kind == EventKind::error &&
        std::holds_alternative<FaultDescriptor>(parent->descriptor)) {
      if (parent->fault().activity == Activity::benign) flag(ViolationKind::benign_parent, e, "benign fault activated");
      if (e.error().origin != origin_for(parent->fault().persistence)) {
        flag(ViolationKind::origin_mismatch, e, "error origin disagrees with fault persistence");
      }
    }
  }

  // Each event has at most one cause, so ancestry is a walk up a parent chain.
  for (const auto& e : chain.events()) {
    std::unordered_set<EventId> seen{e.id};
    bool fault_ancestor = false;
    bool error_ancestor = false;
    const Event* cur = &e;
    bool cyclic = false;
    while (cur->cause) {
      const Event* parent = chain.find(*cur->cause);
      if (!parent) break;
      if (!seen.insert(parent->id).second) {
        cyclic = true;
        break;
      }
      if (parent->kind == EventKind::fault) fault_ancestor = true;
      if (parent->kind == EventKind::error) error_ancestor = true;
      // Ancestry for the orphan checks stops at the first fault: a cascade
      // fault is a valid root for its own chain segment.
      if (parent->kind == EventKind::fault) break;
      cur = parent;
    }
    if (cyclic) {
      flag(ViolationKind::cycle, e, "cause chain revisits an event");
      continue;
    }
    if (e.kind == EventKind::error && !fault_ancestor) flag(ViolationKind::orphan_error, e, "no fault ancestor");
    if (e.kind == EventKind::failure && !error_ancestor) flag(ViolationKind::orphan_failure, e, "no error ancestor");
  }
  return verdict;
}

}  // namespace resilsim
