#include <gtest/gtest.h>

#include "resilsim/taxonomy.hpp"

using namespace resilsim;

namespace {

Event fault_at(double t, Persistence p = Persistence::transient, Activity a = Activity::active) {
  return make_fault(t, "c", FaultDescriptor{a, p, Reproducibility::soft});
}

}  // namespace

TEST(Descriptors, RoundTripEveryTuple) {
  for (auto a : {Activity::benign, Activity::dormant, Activity::active})
    for (auto p : {Persistence::permanent, Persistence::transient, Persistence::intermittent})
      for (auto r : {Reproducibility::hard, Reproducibility::soft}) {
        FaultDescriptor d{a, p, r};
        EXPECT_EQ(parse_fault_descriptor(to_string(d)), d);
      }
  for (auto d : {Detection::undetected, Detection::detected})
    for (auto p : {Persistence::permanent, Persistence::transient, Persistence::intermittent})
      for (auto s : {Severity::complete, Severity::partial, Severity::byzantine}) {
        FailureDescriptor f{d, p, s};
        EXPECT_EQ(parse_failure_descriptor(to_string(f)), f);
      }
}

TEST(Descriptors, SerializedForm) {
  EXPECT_EQ(to_string(FaultDescriptor{Activity::active, Persistence::permanent, Reproducibility::hard}),
            "active-permanent-hard");
  EXPECT_EQ(to_string(ErrorDescriptor{Detection::detected, Masking::masked, Origin::soft, Correction::corrected}),
            "detected-masked-soft-corrected");
}

TEST(Descriptors, RejectsMalformedText) {
  EXPECT_THROW(parse_fault_descriptor("active-permanent"), Error);
  EXPECT_THROW(parse_fault_descriptor("active-forever-hard"), Error);
  EXPECT_THROW(parse_error_descriptor("undetected-unmasked-soft-corrected"), Error);
}

TEST(Propagation, ActivationProducesUndetectedUnmaskedError) {
  auto f = fault_at(1.0, Persistence::permanent);
  f.id = 7;
  const auto e = activate_fault(f, 2.0);
  EXPECT_EQ(e.kind, EventKind::error);
  EXPECT_EQ(e.error(), (ErrorDescriptor{Detection::undetected, Masking::unmasked, Origin::hard, Correction::uncorrected}));
  EXPECT_EQ(e.cause, EventId{7});
  EXPECT_DOUBLE_EQ(e.time, 2.0);
}

TEST(Propagation, BenignFaultNeverActivates) {
  try {
    activate_fault(fault_at(0.0, Persistence::transient, Activity::benign), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BenignFault);
  }
}

TEST(Propagation, TriggerBeforeFaultRejected) {
  EXPECT_THROW(activate_fault(fault_at(5.0), 4.0), Error);
}

TEST(Propagation, MaskingIsFinal) {
  const auto e = activate_fault(fault_at(0.0), 0.0);
  Event masked = e;
  masked.descriptor = mask_check(e, ConsumerSemantics::annihilating);
  EXPECT_EQ(masked.error().masking, Masking::masked);
  EXPECT_EQ(mask_check(masked, ConsumerSemantics::propagating).masking, Masking::masked);
  EXPECT_EQ(mask_check(e, ConsumerSemantics::propagating).masking, Masking::unmasked);
  try {
    escalate_to_failure(masked, Severity::complete, Detection::detected, Persistence::transient);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::MaskedError);
  }
}

TEST(Propagation, CascadeMakesOneDormantFaultPerDependent) {
  auto e = activate_fault(fault_at(0.0, Persistence::permanent), 0.0);
  e.id = 2;
  auto f = escalate_to_failure(e, Severity::complete, Detection::detected, Persistence::permanent);
  f.id = 3;
  const auto faults = cascade(f, {"a", "b"});
  ASSERT_EQ(faults.size(), 2u);
  for (const auto& x : faults) {
    EXPECT_EQ(x.fault().activity, Activity::dormant);
    EXPECT_EQ(x.fault().reproducibility, Reproducibility::hard);
    EXPECT_EQ(x.cause, EventId{3});
  }
  EXPECT_TRUE(cascade(f, {}).empty());
}

TEST(CommonTerms, Mapping) {
  const ErrorDescriptor sdc{Detection::undetected, Masking::unmasked, Origin::soft, Correction::uncorrected};
  const ErrorDescriptor due{Detection::detected, Masking::unmasked, Origin::soft, Correction::uncorrected};
  const ErrorDescriptor dce{Detection::detected, Masking::masked, Origin::soft, Correction::corrected};
  EXPECT_TRUE(has_term(sdc, CommonTerm::sdc));
  EXPECT_TRUE(has_term(sdc, CommonTerm::ue));
  EXPECT_TRUE(has_term(due, CommonTerm::due));
  EXPECT_FALSE(has_term(due, CommonTerm::sdc));
  EXPECT_TRUE(has_term(dce, CommonTerm::dce));
  EXPECT_TRUE(has_term(FailureDescriptor{Detection::detected, Persistence::permanent, Severity::complete},
                       CommonTerm::fail_stop));
  EXPECT_FALSE(has_term(FailureDescriptor{Detection::detected, Persistence::transient, Severity::complete},
                        CommonTerm::fail_stop));
  EXPECT_TRUE(has_term(FaultDescriptor{Activity::dormant, Persistence::transient, Reproducibility::soft},
                       CommonTerm::latent_fault));
  EXPECT_TRUE(has_term(FaultDescriptor{Activity::active, Persistence::permanent, Reproducibility::hard},
                       CommonTerm::solid_fault));
}

TEST(Chain, WellFormedChainPasses) {
  CausalityChain chain;
  const auto f = chain.add(fault_at(0.0));
  auto e = activate_fault(*chain.find(f), 1.0);
  const auto eid = chain.add(e);
  const auto fid = chain.add(escalate_to_failure(*chain.find(eid), Severity::complete, Detection::detected,
                                                 Persistence::transient));
  for (auto& x : cascade(*chain.find(fid), {"d"})) chain.add(x);
  EXPECT_TRUE(validate_chain(chain).ok());
}

TEST(Chain, DetectsOrphanAndKindOrder) {
  CausalityChain chain;
  chain.add(Event{0, EventKind::failure, 0.0, "c", FailureDescriptor{}, std::nullopt});
  EXPECT_TRUE(validate_chain(chain).has(ViolationKind::orphan_failure));

  CausalityChain bad;
  const auto f = bad.add(fault_at(0.0));
  bad.add(Event{0, EventKind::failure, 0.0, "c", FailureDescriptor{}, f});
  EXPECT_TRUE(validate_chain(bad).has(ViolationKind::kind_order));
}

TEST(Chain, DetectsDanglingCauseAndTimeRegression) {
  CausalityChain chain;
  chain.add(Event{0, EventKind::error, 0.0, "c", ErrorDescriptor{}, EventId{99}});
  EXPECT_TRUE(validate_chain(chain).has(ViolationKind::dangling_cause));

  CausalityChain late;
  const auto f = late.add(fault_at(5.0));
  late.add(Event{0, EventKind::error, 1.0, "c", ErrorDescriptor{}, f});
  EXPECT_TRUE(validate_chain(late).has(ViolationKind::time_regression));
}

TEST(Chain, AllowedEdges) {
  EXPECT_TRUE(allowed_edge(EventKind::fault, EventKind::error));
  EXPECT_TRUE(allowed_edge(EventKind::error, EventKind::error));
  EXPECT_TRUE(allowed_edge(EventKind::error, EventKind::failure));
  EXPECT_TRUE(allowed_edge(EventKind::failure, EventKind::fault));
  EXPECT_FALSE(allowed_edge(EventKind::fault, EventKind::failure));
  EXPECT_FALSE(allowed_edge(EventKind::failure, EventKind::error));
  EXPECT_FALSE(allowed_edge(EventKind::fault, EventKind::fault));
}
