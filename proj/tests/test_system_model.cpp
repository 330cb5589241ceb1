#include <gtest/gtest.h>

#include "resilsim/system_model.hpp"

using namespace resilsim;

namespace {

Json pool_doc(int nodes) {
  Json kids = Json::array();
  for (int i = 1; i <= nodes; ++i) kids.push_back(Json{{"id", "n" + std::to_string(i)}});
  kids.push_back(Json{{"id", "job"}, {"scope", "application"}, {"state", {{"persistent", 4.0}, {"dynamic", 6.0}}}});
  Json edges = Json::array();
  for (int i = 1; i <= nodes; ++i) {
    edges.push_back(Json{{"from", "n" + std::to_string(i)}, {"to", "job"}, {"semantics", "redundant"}});
  }
  return Json{{"system", {{"id", "pool"}, {"compose", "redundant"}, {"children", kids}}}, {"edges", edges}};
}

}  // namespace

TEST(Model, BuildsHierarchyAndEdges) {
  const auto m = build_model(pool_doc(4));
  EXPECT_EQ(m.size(), 6u);
  EXPECT_EQ(m.root().id, "pool");
  EXPECT_EQ(m.at("n2").parent, 0);
  EXPECT_EQ(m.providers_of("job").size(), 4u);
  EXPECT_EQ(m.consumers_of("n1").size(), 1u);
  EXPECT_EQ(m.at("job").app, "job");
  EXPECT_DOUBLE_EQ(m.at("job").weight, 1.0);
  EXPECT_DOUBLE_EQ(m.at("n1").weight, 0.0);
}

TEST(Model, JsonRoundTrip) {
  const auto m = build_model(pool_doc(3));
  EXPECT_EQ(build_model(model_to_json(m)), m);
}

TEST(Model, SchemaErrorsCarryPath) {
  Json doc = pool_doc(2);
  doc["system"]["children"][0]["compose"] = "sideways";
  try {
    build_model(doc);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "/system/children/0/compose");
  }
  Json dup = pool_doc(2);
  dup["system"]["children"][1]["id"] = "n1";
  EXPECT_THROW(build_model(dup), SchemaError);
  Json unknown = pool_doc(2);
  unknown["edges"][0]["from"] = "ghost";
  EXPECT_THROW(build_model(unknown), Error);
}

TEST(Model, CyclicEdgesRejected) {
  Json doc = pool_doc(2);
  doc["edges"].push_back(Json{{"from", "job"}, {"to", "n1"}, {"semantics", "serial"}});
  EXPECT_THROW(build_model(doc), Error);
}

TEST(Status, TransitionsAccrueTime) {
  auto m = build_model(pool_doc(2));
  m = set_status(m, "n1", Status::unscheduled_outage, 10.0);
  m = set_status(m, "n1", Status::service_delivery, 12.5);
  m = set_status(m, "n1", Status::scheduled_outage, 20.0);
  const auto clk = status_times(m, "n1", 30.0);
  EXPECT_DOUBLE_EQ(clk.t_pu, 17.5);
  EXPECT_DOUBLE_EQ(clk.t_ud, 2.5);
  EXPECT_DOUBLE_EQ(clk.t_sd, 10.0);
  EXPECT_THROW(set_status(m, "n1", Status::service_delivery, 5.0), Error);
}

TEST(Status, RetiredComponentsRejected) {
  Json doc = pool_doc(2);
  doc["system"]["children"][0]["lifecycle"] = "retired";
  const auto m = build_model(doc);
  try {
    set_status(m, "n1", Status::service_delivery, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RetiredComponent);
  }
}

TEST(Coverage, FusedDomain) {
  const auto m = build_model(pool_doc(2));
  ProtectionDomain d{{"job"}, {StateAspect::persistent, StateAspect::dynamic}};
  const auto c = coverage(d, m);
  EXPECT_DOUBLE_EQ(c.covered_state_units, 10.0);
  EXPECT_DOUBLE_EQ(c.total_state_units, 10.0);
  ProtectionDomain only{{"job"}, {StateAspect::persistent}};
  EXPECT_DOUBLE_EQ(coverage(only, m).covered_state_units, 4.0);
  EXPECT_THROW(coverage(ProtectionDomain{{"ghost"}, {StateAspect::persistent}}, m), Error);
  EXPECT_THROW(coverage(ProtectionDomain{{"job"}, {}}, m), Error);
  EXPECT_THROW(coverage(ProtectionDomain{{"job"}, {StateAspect::stateless, StateAspect::dynamic}}, m), Error);
}

TEST(Degrade, PoolShrinksAndFactorFollows) {
  Json doc{{"system", {{"id", "pool"}, {"compose", "redundant"},
                       {"children", Json::array({Json{{"id", "n1"}}, Json{{"id", "n2"}}, Json{{"id", "n3"}},
                                                 Json{{"id", "n4"}}})}}}};
  const auto m = build_model(doc);
  const auto d = degrade(m, "n1");
  EXPECT_TRUE(d.model.at("n1").excluded);
  EXPECT_DOUBLE_EQ(d.factor, 0.75);
  const auto again = degrade(d.model, "n1");
  EXPECT_EQ(again.model, d.model);
  const auto back = readmit(d.model, "n1");
  EXPECT_FALSE(back.model.at("n1").excluded);
}

TEST(Degrade, LastProviderIsAPartition) {
  auto m = build_model(pool_doc(2));
  m = degrade(m, "n1").model;
  try {
    degrade(m, "n2");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PartitionError);
  }
}
