// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "bftguard/scenario/campaign.hpp"

namespace bftguard {
namespace {

const std::filesystem::path kScenarioDir = BFTGUARD_SCENARIO_DIR;

Scenario load(const std::string& name) { return parse_scenario(kScenarioDir / (name + ".scn")); }

TEST(CampaignTest, EpisodeSeedsAreDistinct) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 10000; ++i) seeds.insert(episode_seed(42, i));
  EXPECT_EQ(seeds.size(), 10000u);
  EXPECT_NE(episode_seed(1, 0), episode_seed(2, 0));
}

TEST(CampaignTest, RandomizedEpisodesStayWithinTheFaultBudget) {
  const Scenario base = load("fuzz_n7");
  for (std::uint64_t i = 0; i < 300; ++i) {
    const Scenario s = randomize_episode(base, episode_seed(9, i), base.f);
    EXPECT_LE(s.faulty_count(), s.f);
    EXPECT_TRUE(validate_scenario(s).empty());
    EXPECT_FALSE(s.supervisor_enabled);
    EXPECT_LT(s.network.drop_rate, 0.1);
  }
}

TEST(CampaignTest, SmallCampaignPasses) {
  const auto rep = fuzz_campaign(load("fuzz_n4"), CampaignOptions{200, 3, 1, std::nullopt});
  EXPECT_EQ(rep.episodes, 200u);
  EXPECT_EQ(rep.agreement_violations, 0u);
  EXPECT_EQ(rep.liveness_failures, 0u);
  EXPECT_TRUE(rep.passed());
  EXPECT_LE(rep.max_rounds, rep.liveness_bound);
  EXPECT_LE(rep.max_view_changes, 2u);
  EXPECT_FALSE(rep.first_failure.has_value());
  EXPECT_NE(rep.text().find("PASS"), std::string::npos);
}

TEST(CampaignTest, SameSeedSameDigestAcrossJobCounts) {
  const Scenario base = load("fuzz_n4");
  const auto a = fuzz_campaign(base, CampaignOptions{60, 77, 1, std::nullopt});
  const auto b = fuzz_campaign(base, CampaignOptions{60, 77, 3, std::nullopt});
  const auto c = fuzz_campaign(base, CampaignOptions{60, 78, 1, std::nullopt});
  EXPECT_EQ(a.digest, b.digest);
  EXPECT_EQ(a.text(), b.text());
  EXPECT_NE(a.digest, c.digest);
}

TEST(CampaignTest, SingleEpisodeReplaysFromItsSeed) {
  const Scenario base = load("fuzz_n4");
  const auto a = run_fuzz_episode(base, 5, 17, 1);
  const auto b = run_fuzz_episode(base, 5, 17, 1);
  EXPECT_EQ(a.seed, episode_seed(5, 17));
  EXPECT_EQ(a.faults, b.faults);
  EXPECT_EQ(a.decision_digest, b.decision_digest);
  EXPECT_EQ(a.event_digest, b.event_digest);
}

TEST(CampaignTest, MoreSlotsThanFNeedsExplicitOptIn) {
  const Scenario base = load("fuzz_n4");
  EXPECT_THROW(fuzz_campaign(base, CampaignOptions{10, 0, 1, base.f + 1}), ScenarioError);
}

TEST(CampaignTest, BeyondTheFaultModelFailuresAreReported) {
  Scenario base = load("fuzz_n4");
  base.expects_violation = true;
  const auto rep = fuzz_campaign(base, CampaignOptions{300, 1, 1, 3});
  EXPECT_FALSE(rep.passed());
  ASSERT_TRUE(rep.first_failure.has_value());
  EXPECT_EQ(rep.first_failure->first, episode_seed(1, rep.first_failure->second));
  EXPECT_NE(rep.text().find("FAIL"), std::string::npos);
}

}  // namespace
}  // namespace bftguard
