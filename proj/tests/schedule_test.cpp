// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "schedule_explorer.hpp"

namespace bftguard::testing {
namespace {

ExplorerSetup equivocating_leader(std::vector<std::string> outputs, std::vector<ModuleId> side_a = {}) {
  ExplorerSetup s;
  s.labels = {"continue", "brake", "stop"};
  s.outputs = std::move(outputs);
  s.adversary = 0;
  s.adversary_profile = ByzantineEquivocate{"continue", "brake"};
  s.side_a = std::move(side_a);
  s.timeout_rounds = 10;
  return s;
}

std::string describe(const ExplorerStats& st) {
  std::string out = "states=" + std::to_string(st.states) + " leaves=" + std::to_string(st.leaves);
  for (const auto& f : st.failures) out += "\n  " + f;
  return out;
}

TEST(ScheduleTest, EquivocatorCannotSplitHonestReplicasThatAgreeWithNeitherSide) {
  // Honest replicas all see "stop"; neither proposal can gather a quorum,
  // so the leader must be replaced before anything commits.
  ExplorerLimits limits;
  limits.depth = 5;
  const auto st = explore_schedules(equivocating_leader({"-", "stop", "stop", "stop"}), limits);
  SCOPED_TRACE(describe(st));
  EXPECT_GT(st.leaves, 0u);
  EXPECT_EQ(st.agreement_violations, 0u);
  EXPECT_EQ(st.certificate_conflicts, 0u);
  EXPECT_EQ(st.undecided_leaves, 0u);
  EXPECT_EQ(st.committed_in_view0, 0u);
  EXPECT_EQ(st.committed_values, (std::set<std::string>{"stop"}));
  EXPECT_GE(st.max_view, 1u);
}

TEST(ScheduleTest, EquivocatorWithPartialHonestSupportKeepsAgreement) {
  for (const auto& outputs : std::vector<std::vector<std::string>>{
           {"-", "continue", "continue", "continue"},
           {"-", "continue", "brake", "brake"},
           {"-", "brake", "continue", "brake"},
       }) {
    ExplorerLimits limits;
    limits.depth = 4;
    const auto st = explore_schedules(equivocating_leader(outputs), limits);
    SCOPED_TRACE(outputs[1] + "," + outputs[2] + "," + outputs[3] + " " + describe(st));
    EXPECT_EQ(st.agreement_violations, 0u);
    EXPECT_EQ(st.certificate_conflicts, 0u);
    EXPECT_LE(st.committed_values.size(), 1u);
  }
}

TEST(ScheduleTest, SilentLeaderIsReplacedUnderEveryOrdering) {
  ExplorerSetup s;
  s.labels = {"continue", "brake"};
  s.outputs = {"-", "continue", "continue", "continue"};
  s.adversary_profile = Silent{};
  const auto st = explore_schedules(s, ExplorerLimits{});
  SCOPED_TRACE(describe(st));
  EXPECT_EQ(st.agreement_violations, 0u);
  EXPECT_EQ(st.undecided_leaves, 0u);
  EXPECT_EQ(st.committed_values, (std::set<std::string>{"continue"}));
}

}  // namespace
}  // namespace bftguard::testing
