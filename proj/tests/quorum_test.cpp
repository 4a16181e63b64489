// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "bftguard/quorum/decision.hpp"
#include "bftguard/quorum/quorum.hpp"
#include "oracles.hpp"

namespace bftguard {
namespace {

TEST(QuorumTest, MatchesSearchOracleForSmallF) {
  for (std::uint32_t f = 0; f <= 3; ++f) {
    SCOPED_TRACE(f);
    EXPECT_EQ(min_replicas(f), testing::search_min_replicas(f));
    EXPECT_EQ(quorum_size(f), testing::search_quorum_size(f));
    EXPECT_EQ(client_match(f), testing::search_client_match(f));
  }
}

TEST(QuorumTest, FourModulesTolerateOne) {
  EXPECT_EQ(min_replicas(1), 4u);
  EXPECT_EQ(quorum_size(1), 3u);
  EXPECT_EQ(client_match(1), 2u);
  EXPECT_EQ(min_replicas(2), 7u);
  EXPECT_EQ(quorum_size(2), 5u);
  EXPECT_EQ(client_match(3), 4u);
  EXPECT_EQ(min_replicas(0), 1u);
}

TEST(QuorumTest, QuorumsIntersectInAnHonestReplica) {
  for (std::uint32_t f : {1u, 2u}) {
    EXPECT_GE(testing::min_quorum_intersection(min_replicas(f), quorum_size(f)), f + 1) << "f=" << f;
  }
  // One replica short and two quorums can miss each other's honest members.
  EXPECT_LT(testing::min_quorum_intersection(3, 2), 2u);
}

TEST(QuorumTest, SilentReplicasLeaveExactlyAQuorum) {
  for (std::uint32_t f = 0; f < 20; ++f) EXPECT_EQ(min_replicas(f) - quorum_size(f), f);
}

TEST(QuorumTest, ConfigRejectsTooFewReplicas) {
  EXPECT_THROW(QuorumConfig(3, 1), std::invalid_argument);
  EXPECT_THROW(QuorumConfig(0, 0), std::invalid_argument);
  try {
    QuorumConfig(6, 2);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("n < 3f+1"), std::string::npos);
  }
  const QuorumConfig q(5, 1);
  EXPECT_EQ(q.quorum(), 3u);
  EXPECT_EQ(q.isolation_budget(), 2u);
  EXPECT_EQ(QuorumConfig::for_replicas(7), QuorumConfig(7, 2));
  EXPECT_EQ(QuorumConfig::for_replicas(6).f(), 1u);
}

TEST(DecisionSpaceTest, MintsOnlyKnownLabels) {
  const DecisionSpace space({"continue", "brake", "stop"}, "brake");
  EXPECT_EQ(space.value("stop").label(), "stop");
  EXPECT_THROW(space.value("accelerate"), std::invalid_argument);
  EXPECT_FALSE(space.try_value("accelerate").has_value());
  EXPECT_EQ(space.index_of("brake"), 1u);
  EXPECT_EQ(space.safe_default().label(), "brake");
  EXPECT_TRUE(space.contains(space.at(2)));
}

TEST(DecisionSpaceTest, RejectsMalformedSpaces) {
  EXPECT_THROW(DecisionSpace({}, "x"), std::invalid_argument);
  EXPECT_THROW(DecisionSpace({"a", "a"}, "a"), std::invalid_argument);
  EXPECT_THROW(DecisionSpace({"a", "b"}, "c"), std::invalid_argument);
}

}  // namespace
}  // namespace bftguard
