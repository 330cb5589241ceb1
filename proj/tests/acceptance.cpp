// Acceptance suite: one PASS/FAIL line per criterion; exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "resilsim/resilsim.hpp"

using namespace resilsim;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool within(double observed, double expected, double se, double k = 3.0) {
  return std::abs(observed - expected) <= k * se;
}

// 1 ------------------------------------------------------------------------
Outcome nines_table() {
  Outcome o;
  struct Row {
    double a;
    double seconds;
    const char* text;
  };
  const Row rows[] = {{0.9, 36 * 86400.0 + 12 * 3600.0, "36 days, 12 hours"},
                      {0.99, 87 * 3600.0 + 36 * 60.0, "87 hours, 36 minutes"},
                      {0.999, 8 * 3600.0 + 45.6 * 60.0, "8 hours, 45.6 minutes"},
                      {0.9999, 52 * 60.0 + 33.6, "52 minutes, 33.6 seconds"},
                      {0.99999, 5 * 60.0 + 15.4, "5 minutes, 15.4 seconds"},
                      {0.999999, 31.5, "31.5 seconds"}};
  int expected_nines = 1;
  for (const auto& r : rows) {
    const auto n = nines_rating(r.a);
    const double secs = n.downtime_hours * 3600.0;
    o.require(std::abs(secs - r.seconds) <= 0.1, fmt(r.a) + ": " + fmt(secs) + " s vs " + fmt(r.seconds));
    o.require(n.downtime == r.text, fmt(r.a) + ": rendered '" + n.downtime + "'");
    o.require(n.nines == expected_nines++, fmt(r.a) + ": nines " + std::to_string(n.nines));
  }
  return o;
}

// 2 ------------------------------------------------------------------------
Outcome composition() {
  Outcome o;
  const double t = 10.0;
  const std::vector<std::vector<double>> systems{{0.9, 0.8}, {0.95, 0.7, 0.85}};
  const int trials = 100000;
  for (const auto& parts : systems) {
    std::vector<LifetimeDistribution> life;
    for (double r : parts) life.push_back(LifetimeDistribution::exponential(-std::log(r) / t));
    RandomStream rng(2024, "acceptance/composition/" + std::to_string(parts.size()));
    int serial_ok = 0, parallel_ok = 0;
    for (int i = 0; i < trials; ++i) {
      int alive = 0;
      for (const auto& d : life) alive += sample(d, rng) > t ? 1 : 0;
      serial_ok += alive == static_cast<int>(parts.size());
      parallel_ok += alive > 0;
    }
    const double rs = serial_reliability(parts), rp = parallel_reliability(parts);
    const double ps = static_cast<double>(serial_ok) / trials, pp = static_cast<double>(parallel_ok) / trials;
    o.require(within(ps, rs, std::sqrt(rs * (1 - rs) / trials)), "serial " + fmt(ps) + " vs " + fmt(rs));
    o.require(within(pp, rp, std::sqrt(rp * (1 - rp) / trials)), "parallel " + fmt(pp) + " vs " + fmt(rp));
  }
  for (double r : {0.5, 0.9, 0.99, 0.3141592653589793}) {
    for (unsigned n = 1; n <= 8; ++n) {
      const std::vector<double> same(n, r);
      o.require(identical_serial_reliability(r, n) == serial_reliability(same), "identical serial shortcut");
      o.require(identical_parallel_reliability(r, n) == parallel_reliability(same), "identical parallel shortcut");
    }
  }
  return o;
}

// 3 ------------------------------------------------------------------------
Outcome product_rule() {
  Outcome o;
  const int trials = 100000;
  for (std::size_t n : {1u, 2u, 4u, 8u}) {
    const auto obs = observe_system_reliability(n, 0.1, trials, 1000 * n);
    const double expected = std::pow(0.9, static_cast<double>(n));
    o.require(within(obs.estimate, expected, std::sqrt(expected * (1 - expected) / trials)),
              "N=" + std::to_string(n) + ": " + fmt(obs.estimate) + " vs " + fmt(expected));
  }
  return o;
}

// 4 ------------------------------------------------------------------------
Outcome mttf_fit() {
  Outcome o;
  FaultSource src;
  src.arrival = ArrivalKind::distribution;
  src.interarrival = LifetimeDistribution::exponential(0.001);
  src.recurrence_h.reset();
  RandomStream rng(99, "acceptance/mttf");
  const auto times = inject(src, rng, 1.0e8);
  o.require(times.size() >= 100000, std::to_string(times.size()) + " arrivals");
  const double empirical = times.empty() ? 0.0 : times.back() / static_cast<double>(times.size());
  o.require(std::abs(empirical - 1000.0) <= 0.03 * 1000.0, "empirical MTTF " + fmt(empirical));
  for (double m : {empirical, 1000.0, 1.0 / 3.0, 12345.678}) {
    const double fit = fit_rate(m);
    o.require(std::abs(fit * m - 1e9) <= 1e-9 * 1e9, "FIT*MTTF for " + fmt(m));
  }
  return o;
}

// 5 ------------------------------------------------------------------------
Outcome tmr_suite() {
  Outcome o;
  RandomStream rng(5, "acceptance/tmr");
  int masked = 0, total = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto good = static_cast<std::int64_t>(rng.below(1u << 30));
    for (std::size_t pos = 0; pos < 3; ++pos) {
      std::vector<std::int64_t> v(3, good);
      v[pos] = good + 1 + static_cast<std::int64_t>(rng.below(1000));
      const auto r = nmr_execute(v);
      ++total;
      if (r.output && *r.output == good && r.verdict == Verdict::corrected) ++masked;
    }
  }
  o.require(masked == total, std::to_string(masked) + "/" + std::to_string(total) + " masked");

  // Through the engine: a single corrupted replica yields a DCE record.
  Json doc{{"system",
            {{"id", "cpu"},
             {"state", {{"dynamic", 1.0}}},
             {"fault_sources", Json::array({Json{{"classes", "active-transient-soft"},
                                                 {"dist", "scripted"},
                                                 {"params", {{"times", Json::array({1.0, 2.0, 3.0})}}}}})}}},
           {"solution", Json::array({Json{{"id", "tmr"},
                                          {"structure", "nmr"},
                                          {"domain", {{"components", Json::array({"cpu"})}, {"aspects", Json::array({"dynamic"})}}},
                                          {"params", {{"replicas", 3}}}}})},
           {"sim", {{"horizon_h", 10.0}}}};
  const auto run_tmr = run(parse_config(doc));
  o.require(run_tmr.report.chain.dce == 3 && run_tmr.report.chain.failures == 0, "engine TMR did not mask");

  int dmr_due = 0, dmr_total = 0;
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b) {
      if (a == b) continue;
      ++dmr_total;
      if (nmr_execute(std::vector<int>{a, b}).verdict == Verdict::uncorrectable) ++dmr_due;
    }
  o.require(dmr_due == dmr_total, "DMR mismatches " + std::to_string(dmr_due) + "/" + std::to_string(dmr_total));

  auto survives = [](std::size_t n, std::size_t f) {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) > f) continue;
      std::vector<std::optional<int>> outs(n, 1);
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) outs[i].reset();
      }
      const auto r = nmr_execute<int>(outs);
      if (!r.output || *r.output != 1) return false;
    }
    return true;
  };
  for (std::size_t f = 0; f <= 3; ++f) {
    const auto n = required_replicas(f);
    o.require(survives(n, f), "required_replicas(" + std::to_string(f) + ") insufficient");
    for (std::size_t m = 1; m < n; ++m) o.require(!survives(m, f), "N=" + std::to_string(m) + " also suffices");
  }
  return o;
}

// 6 ------------------------------------------------------------------------
Outcome rollback_accounting() {
  Outcome o;
  const auto rb = run(scenario_cr().build());
  const auto restores = records_of(rb.trace, RecordKind::restore, "proc");
  o.require(restores.size() == 1, "expected one restore");
  if (!restores.empty()) {
    const auto to = note_value(restores[0]->note, "to");
    const auto lost = note_value(restores[0]->note, "lost");
    o.require(to && *to == "20", "restored to " + std::string(to.value_or("?")));
    o.require(lost && *lost == "5", "lost " + std::string(lost.value_or("?")));
  }
  o.require(rb.report.accounting.lost == 5.0, "report lost " + fmt(rb.report.accounting.lost));
  const auto rf = run(scenario_cr(CrOptions{.rollforward = true}).build());
  o.require(rf.report.accounting.lost == 0.0, "roll-forward lost " + fmt(rf.report.accounting.lost));
  o.require(rf.report.accounting.progress >= rb.report.accounting.progress, "roll-forward progress below rollback");
  return o;
}

// 7 ------------------------------------------------------------------------
bool has_fault_and_error_ancestors(const std::vector<TraceRecord>& trace, const TraceRecord& failure) {
  bool error = false, fault = false;
  std::optional<std::uint64_t> cur = failure.cause;
  while (cur) {
    const auto& r = trace.at(*cur);
    error = error || r.kind == RecordKind::error;
    fault = fault || r.kind == RecordKind::fault;
    cur = r.cause;
  }
  return error && fault;
}

Outcome chain_fuzz() {
  Outcome o;
  RandomStream pick(7, "acceptance/fuzz");
  std::size_t violations = 0, orphans = 0, failures = 0;
  const int runs = 10000;
  for (int i = 0; i < runs; ++i) {
    Scenario s;
    switch (pick.below(4)) {
      case 0: {
        CrOptions c;
        c.failure_at_h = 1.0 + 90.0 * pick.uniform();
        s = scenario_cr(c);
        s.config["system"]["children"][0]["fault_sources"].push_back(
            Json{{"classes", pick.bernoulli(0.5) ? "active-permanent-hard" : "dormant-intermittent-soft"},
                 {"dist", "exponential"},
                 {"params", {{"rate", 0.05 * pick.uniform()}}},
                 {"failure", pick.bernoulli(0.5) ? "detected-transient-complete" : "undetected-transient-partial"},
                 {"activation_delay_h", 2.0 * pick.uniform()}});
        break;
      }
      case 1: {
        MigrationOptions m;
        m.spare = pick.bernoulli(0.5);
        m.fault_rate = 0.01 * pick.uniform();
        m.horizon_h = 200.0;
        s = scenario_migration(m);
        break;
      }
      case 2: {
        CrosslayerOptions c;
        c.single_bit_rate = 0.2 * pick.uniform();
        c.double_bit_rate = 0.05 * pick.uniform();
        c.abft_failure_probability = 0.5 * pick.uniform();
        s = scenario_crosslayer(c);
        break;
      }
      default: {
        DetectorOptions d;
        d.horizon_h = 500.0;
        d.miss_rate = 0.5 * pick.uniform();
        d.false_positive_rate = 0.5 * pick.uniform();
        s = scenario_detector(d);
        break;
      }
    }
    const auto r = run(s.build(pick()));
    violations += r.report.chain.violations;
    for (const auto& rec : r.trace) {
      if (rec.kind != RecordKind::failure) continue;
      ++failures;
      if (!has_fault_and_error_ancestors(r.trace, rec)) ++orphans;
    }
  }
  o.require(violations == 0, std::to_string(violations) + " chain violations");
  o.require(orphans == 0, std::to_string(orphans) + " failures without fault/error ancestors");
  o.require(failures > 0, "fuzz produced no failures");
  o.detail = o.pass ? std::to_string(runs) + " runs, " + std::to_string(failures) + " failures" : o.detail;
  return o;
}

// 8 ------------------------------------------------------------------------
Outcome determinism() {
  Outcome o;
  auto all = builtin_scenarios();
  all.push_back(scenario_cr(CrOptions{.rollforward = true}));
  all.push_back(scenario_migration(MigrationOptions{.spare = false}));
  for (const auto& s : all) {
    const auto a = run(s.build(31));
    const auto b = run(s.build(31));
    o.require(render_trace(a.trace) == render_trace(b.trace), s.name + ": trace differs");
    o.require(report_to_text(a.report) == report_to_text(b.report) &&
                  report_to_json(a.report).dump() == report_to_json(b.report).dump(),
              s.name + ": report differs");
  }
  return o;
}

// 9 ------------------------------------------------------------------------
Outcome completeness() {
  Outcome o;
  for (const auto& s : {scenario_cr(), scenario_migration(), scenario_crosslayer()}) {
    const auto cfg = s.build();
    o.require(validate_solution(cfg.solution, cfg.model).complete, s.name + " not complete");
    const auto cut = parse_config(s.without(s.detection_instance));
    const auto v = validate_solution(cut.solution, cut.model);
    const auto& gaps = v.axis("capability").gaps;
    o.require(!v.complete && std::find(gaps.begin(), gaps.end(), "missing: detection") != gaps.end(),
              s.name + " without " + s.detection_instance + " still complete");
  }
  return o;
}

// 10 -----------------------------------------------------------------------
Outcome perspective() {
  Outcome o;
  const DueAbortOptions opts;
  const auto r = run(scenario_due_abort(opts).build());
  o.require(r.report.smttr_h.value == 0.0, "SMTTR " + fmt(r.report.smttr_h.value));
  const auto it = r.report.amttr_h.find("app");
  o.require(it != r.report.amttr_h.end() && it->second.value == opts.app_recovery_h && opts.app_recovery_h > 0.0,
            "AMTTR " + (it == r.report.amttr_h.end() ? std::string("missing") : fmt(it->second.value)));
  return o;
}

// 11 -----------------------------------------------------------------------
Outcome precision_recall() {
  Outcome o;
  const DetectorOptions opts;  // miss 0.1, false positives 0.2
  const auto r = run(scenario_detector(opts).build(11));
  const auto& t = r.report.tally;
  o.require(t.tp >= 10000, "only " + std::to_string(t.tp) + " detected failures");
  const double p = precision(t), rc = recall(t);
  const double p0 = 1.0 - opts.false_positive_rate, r0 = 1.0 - opts.miss_rate;
  const double sp = std::sqrt(p0 * (1 - p0) / static_cast<double>(t.tp + t.fp));
  const double sr = std::sqrt(r0 * (1 - r0) / static_cast<double>(t.tp + t.fn));
  o.require(within(p, p0, sp), "precision " + fmt(p) + " vs " + fmt(p0) + " (se " + fmt(sp) + ")");
  o.require(within(rc, r0, sr), "recall " + fmt(rc) + " vs " + fmt(r0) + " (se " + fmt(sr) + ")");
  o.require(std::abs(precision_complement(t) - p) < 1e-12 && std::abs(recall_complement(t) - rc) < 1e-12,
            "complement forms disagree");
  if (o.pass) o.detail = "precision " + fmt(p) + ", recall " + fmt(rc) + " over " + std::to_string(t.tp) + " failures";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {"nines table reproduction", 1.0, nines_table},
      {"reliability composition", 10.0, composition},
      {"(1-p)^N product rule", 30.0, product_rule},
      {"MTTF and FIT", 0.0, mttf_fit},
      {"TMR property suite", 0.0, tmr_suite},
      {"rollback accounting", 0.0, rollback_accounting},
      {"chain validity fuzz", 0.0, chain_fuzz},
      {"determinism", 0.0, determinism},
      {"completeness validator", 0.0, completeness},
      {"perspective metrics", 0.0, perspective},
      {"precision and recall", 0.0, precision_recall},
  };
  int failed = 0;
  int index = 1;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += (o.detail.empty() ? "" : "; ") + std::string("over time budget");
    }
    std::printf("%s %2d %-26s %8.3fs%s%s\n", o.pass ? "PASS" : "FAIL", index++, c.name, secs,
                o.detail.empty() ? "" : "  ", o.detail.c_str());
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
