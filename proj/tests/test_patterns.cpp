#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "resilsim/patterns.hpp"

using namespace resilsim;

namespace {

SystemModel small_model() {
  return build_model(Json{
      {"system",
       {{"id", "node"},
        {"children", Json::array({Json{{"id", "proc"}, {"scope", "application"}, {"state", {{"persistent", 1.0}}}}})}}}});
}

Json inst(const std::string& id, const std::string& structure, Json params = Json::object()) {
  return Json{{"id", id},
              {"structure", structure},
              {"domain", {{"components", Json::array({"proc"})}, {"aspects", Json::array({"persistent"})}}},
              {"params", params}};
}

SolutionVerdict verdict_of(const Json& solution) {
  return validate_solution(parse_solution(solution, "/solution"), small_model());
}

}  // namespace

// ---------------------------------------------------------------------------
// Voting

TEST(Nmr, SingleCorruptionMaskedAtEveryPosition) {
  RandomStream rng(11, "test/tmr");
  for (int trial = 0; trial < 100; ++trial) {
    const auto good = static_cast<std::int64_t>(rng.below(1000));
    for (std::size_t pos = 0; pos < 3; ++pos) {
      std::vector<std::int64_t> v(3, good);
      v[pos] = good + 1 + static_cast<std::int64_t>(rng.below(50));
      const auto r = nmr_execute(v);
      ASSERT_TRUE(r.output);
      EXPECT_EQ(*r.output, good);
      EXPECT_EQ(r.verdict, Verdict::corrected);
    }
  }
}

TEST(Nmr, PermutationInvariant) {
  std::vector<int> v{4, 9, 4, 9, 9};
  std::sort(v.begin(), v.end());
  const auto ref = nmr_execute(v);
  do {
    const auto r = nmr_execute(v);
    EXPECT_EQ(r.output, ref.output);
    EXPECT_EQ(r.verdict, ref.verdict);
  } while (std::next_permutation(v.begin(), v.end()));
}

TEST(Nmr, DmrMismatchIsUncorrectable) {
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      const auto r = nmr_execute(std::vector<int>{a, b});
      EXPECT_TRUE(r.comparison_only);
      EXPECT_EQ(r.verdict, a == b ? Verdict::agreed : Verdict::uncorrectable);
    }
}

TEST(Nmr, EvenAboveTwoIsComparisonWithWarning) {
  const auto r = nmr_execute(std::vector<int>{1, 1, 1, 2});
  EXPECT_TRUE(r.comparison_only);
  EXPECT_TRUE(r.warning);
  EXPECT_EQ(r.verdict, Verdict::uncorrectable);
}

TEST(Nmr, NoMajority) {
  EXPECT_EQ(nmr_execute(std::vector<int>{1, 2, 3}).verdict, Verdict::uncorrectable);
  EXPECT_THROW(nmr_execute(std::vector<int>{}), Error);
}

TEST(Nmr, RequiredReplicasIsMinimal) {
  // Exhaustive: every subset of up to f fail-stop losses must be outvoted by N
  // replicas; N - 1 must fail for some subset.
  auto survives_all = [](std::size_t n, std::size_t f) {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) > f) continue;
      std::vector<std::optional<int>> outs(n, 7);
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) outs[i] = std::nullopt;
      }
      const auto r = nmr_execute<int>(outs);
      if (!r.output || *r.output != 7) return false;
    }
    return true;
  };
  for (std::size_t f = 0; f <= 3; ++f) {
    const auto n = required_replicas(f);
    EXPECT_TRUE(survives_all(n, f)) << f;
    for (std::size_t m = 1; m < n; ++m) EXPECT_FALSE(survives_all(m, f)) << "f=" << f << " n=" << m;
  }
}

TEST(NVersion, VoteAndSyncOverhead) {
  std::vector<VariantOutput<int>> v{{5, 1.0}, {5, 1.5}, {6, 3.0}};
  const auto r = nversion_execute(v);
  EXPECT_EQ(r.vote.output, 5);
  EXPECT_EQ(r.vote.verdict, Verdict::corrected);
  EXPECT_DOUBLE_EQ(r.sync_overhead_h, 2.0);
}

TEST(RecoveryBlock, ExecutesExactlyKVariants) {
  for (std::size_t k = 1; k <= 4; ++k) {
    std::vector<std::function<int()>> variants;
    for (std::size_t i = 1; i <= 4; ++i) variants.push_back([i] { return static_cast<int>(i); });
    const auto r = recovery_block<int>(variants, [k](const int& v) { return static_cast<std::size_t>(v) == k; },
                                       std::vector<double>(4, 0.5));
    EXPECT_EQ(r.executions, k);
    EXPECT_EQ(r.accepted_index, k - 1);
    EXPECT_DOUBLE_EQ(r.cost_h, 0.5 * static_cast<double>(k));
  }
  std::vector<std::function<int()>> none{[] { return 0; }, [] { return 0; }};
  try {
    recovery_block<int>(none, [](const int& v) { return v > 0; });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AllVariantsRejected);
  }
}

// ---------------------------------------------------------------------------
// Checkpointing

TEST(Rollback, RestoresLatestCheckpoint) {
  CheckpointStore store("proc");
  checkpoint_create(store, 10.0, 10.0);
  checkpoint_create(store, 20.0, 20.0);
  const auto r = rollback_recover(store, 25.0);
  EXPECT_DOUBLE_EQ(r.restored_time, 20.0);
  EXPECT_DOUBLE_EQ(r.restored_progress, 20.0);
  EXPECT_DOUBLE_EQ(r.lost_hours, 5.0);
  EXPECT_FALSE(r.from_start);
  const auto empty = rollback_recover(CheckpointStore("x"), 7.0);
  EXPECT_TRUE(empty.from_start);
  EXPECT_DOUBLE_EQ(empty.lost_hours, 7.0);
}

TEST(Rollback, ProgressMustNotDecrease) {
  CheckpointStore store("proc");
  checkpoint_create(store, 10.0, 10.0);
  EXPECT_THROW(checkpoint_create(store, 12.0, 9.0), Error);
}

TEST(Rollforward, JournalReplayLosesNothing) {
  CheckpointStore store("proc");
  checkpoint_create(store, 10.0, 10.0);
  checkpoint_create(store, 20.0, 20.0);
  for (double fail : {21.0, 25.0, 29.5}) {
    const auto rb = rollback_recover(store, fail);
    const auto rf = rollforward_recover(store, Journal{0.0, fail}, fail, fail, 0.25);
    EXPECT_DOUBLE_EQ(rf.lost_hours, 0.0);
    EXPECT_GE(rf.restored_progress, rb.restored_progress);
    EXPECT_LE(rb.restored_progress, fail);
    EXPECT_DOUBLE_EQ(rf.recovery_cost_h, 0.25);
  }
  const auto gap = rollforward_recover(store, Journal{22.0, 30.0}, 25.0, 25.0, 0.0);
  EXPECT_TRUE(gap.fell_back);
  EXPECT_DOUBLE_EQ(gap.restored_progress, 20.0);
}

// ---------------------------------------------------------------------------
// Detection and reconfiguration

TEST(Monitoring, RangeCheck) {
  EXPECT_FALSE(monitoring_check({"n", "temp", 50.0}, {0.0, 80.0}));
  const auto s = monitoring_check({"n", "temp", 95.0}, {0.0, 80.0});
  ASSERT_TRUE(s);
  EXPECT_EQ(s->component, "n");
}

TEST(Prediction, LinearTrend) {
  std::vector<Sample> h{{0.0, 40.0}, {1.0, 50.0}, {2.0, 60.0}, {3.0, 70.0}};
  const auto p = prediction_forecast("n", h, 80.0, 1.0);
  ASSERT_TRUE(p);
  EXPECT_NEAR(p->crossing_time, 4.0, 1e-12);
  EXPECT_NEAR(p->slope, 10.0, 1e-12);
  EXPECT_FALSE(prediction_forecast("n", h, 200.0, 1.0));
  EXPECT_THROW(prediction_forecast("n", std::vector<Sample>{{0.0, 1.0}}, 2.0, 1.0), Error);
}

TEST(Restructure, MigratesToSpareThenLowestUtilization) {
  Json doc{{"system",
            {{"id", "cluster"},
             {"compose", "redundant"},
             {"children", Json::array({Json{{"id", "n1"}, {"utilization", 0.9}},
                                       Json{{"id", "n2"}, {"utilization", 0.3}},
                                       Json{{"id", "n3"}, {"utilization", 0.6}},
                                       Json{{"id", "s"}, {"spare", true}},
                                       Json{{"id", "job"}, {"scope", "application"}}})}}},
           {"edges", Json::array({Json{{"from", "n1"}, {"to", "job"}, {"semantics", "serial"}}})}};
  const auto m = build_model(doc);
  const auto r = restructure(m, "n1", true);
  EXPECT_EQ(r.target, "s");
  EXPECT_EQ(r.moved, std::vector<std::string>{"job"});
  EXPECT_TRUE(r.model.at("n1").excluded);
  EXPECT_EQ(r.model.providers_of("job").front()->provider, "s");

  Json nospare = doc;
  nospare["system"]["children"].erase(3);
  const auto r2 = restructure(build_model(nospare), "n1", true);
  EXPECT_EQ(r2.target, "n2");
}

TEST(Rejuvenate, InterpolatesOnlyCorruptedElements) {
  const std::vector<double> region{1.0, 2.0, 99.0, 4.0, 5.0};
  const auto r = rejuvenate(region, {2}, Persistence::transient);
  EXPECT_EQ(r.region, (std::vector<double>{1.0, 2.0, 3.0, 4.0, 5.0}));
  EXPECT_THROW(rejuvenate(region, {2}, Persistence::permanent), Error);
}

TEST(Reinitialize, ScopeOnly) {
  const auto p = reinitialize({{"a", 5.0}, {"b", 7.0}}, {"a"});
  EXPECT_DOUBLE_EQ(p.at("a"), 0.0);
  EXPECT_DOUBLE_EQ(p.at("b"), 7.0);
}

// ---------------------------------------------------------------------------
// Catalog and validation

TEST(Catalog, HierarchyCounts) {
  std::set<Strategy> strategies;
  std::set<Architecture> architectures;
  for (const auto& e : catalog()) {
    architectures.insert(architecture_of(e.structure));
    strategies.insert(strategy_of(architecture_of(e.structure)));
  }
  EXPECT_EQ(catalog().size(), 10u);
  EXPECT_EQ(architectures.size(), 5u);
  EXPECT_EQ(strategies.size(), 3u);
  const auto text = catalog_text();
  EXPECT_NE(text.find("requires external detection"), std::string::npos);
  EXPECT_NE(text.find("2N+1"), std::string::npos);
}

TEST(Catalog, UnknownParamRejected) {
  EXPECT_THROW(parse_instance(inst("x", "rollback", Json{{"bogus", 1}}), "/s/0"), SchemaError);
  EXPECT_THROW(parse_instance(inst("x", "nmr", Json{{"replicas", 0}}), "/s/0"), SchemaError);
}

TEST(Validate, MonitoringPlusRollbackIsComplete) {
  const auto v = verdict_of(Json::array({inst("hb", "monitoring"), inst("ck", "rollback")}));
  EXPECT_TRUE(v.complete);
  EXPECT_EQ(v.axes.size(), 5u);
}

TEST(Validate, RollbackAloneMissesDetection) {
  const auto v = verdict_of(Json::array({inst("ck", "rollback")}));
  EXPECT_FALSE(v.complete);
  const auto& gaps = v.axis("capability").gaps;
  EXPECT_NE(std::find(gaps.begin(), gaps.end(), "missing: detection"), gaps.end());
}

TEST(Validate, MonotoneUnderAddition) {
  const Json base = Json::array({inst("hb", "monitoring"), inst("ck", "rollback")});
  for (const auto* kind : {"nmr", "prediction", "rejuvenation", "reinitialization", "recovery_block"}) {
    Json more = base;
    more.push_back(inst("extra", kind));
    EXPECT_TRUE(verdict_of(more).complete) << kind;
  }
}

TEST(Validate, RoleNarrowsCapabilities) {
  Json abft = inst("abft", "nmr", Json{{"scheme", "checksum"}});
  abft["role"] = Json::array({"mitigation"});
  EXPECT_EQ(capabilities(parse_instance(abft, "/s/0")), CapabilitySet{Capability::mitigation});
}
