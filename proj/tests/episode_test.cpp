// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "bftguard/quorum/messages.hpp"
#include "bftguard/scenario/episode.hpp"

namespace bftguard {
namespace {

const std::filesystem::path kScenarioDir = BFTGUARD_SCENARIO_DIR;

Scenario load(const std::string& name) { return parse_scenario(kScenarioDir / (name + ".scn")); }

std::vector<std::string> record_lines(const EpisodeResult& r) {
  std::vector<std::string> out;
  for (const auto& rec : r.records) out.push_back(format_record(rec));
  return out;
}

Scenario pbft_scenario(const std::string& module_section, std::uint32_t frames = 4) {
  return parse_scenario_text("name = probe\nf = 1\nmode = pbft\nseed = 5\ntimeout_rounds = 10\n\n"
                             "[decision_space]\nlabels = continue brake\nsafe_default = brake\n\n"
                             "[supervisor]\nenabled = false\n\n" +
                             module_section + "\n[observations]\n0.." + std::to_string(frames - 1) +
                             " | continue | - | 4*continue\n");
}

// Every committed value was prepared and committed by a 2f+1 quorum in the
// committing replica's own view of the votes.
void expect_endorsed(const EpisodeResult& r, const Scenario& s, const std::set<ModuleId>& honest) {
  const std::uint32_t q = s.quorum().quorum();
  for (ModuleId m : honest) {
    for (const auto& [frame, label] : r.commits[m]) {
      const Digest d = value_digest(label);
      bool prepared = false;
      bool committed = false;
      for (const auto& v : r.vote_logs[m]) {
        if (v.frame != frame || v.digest != d || v.signers.size() < q) continue;
        prepared |= v.kind == MessageKind::kPrepare;
        committed |= v.kind == MessageKind::kCommit;
      }
      EXPECT_TRUE(prepared && committed) << "module " << m << " frame " << frame;
    }
  }
}

void expect_agreement(const EpisodeResult& r, const std::set<ModuleId>& honest) {
  std::map<Frame, std::string> seen;
  for (ModuleId m : honest) {
    for (const auto& [frame, label] : r.commits[m]) {
      auto [it, fresh] = seen.emplace(frame, label);
      EXPECT_EQ(it->second, label) << "frame " << frame;
    }
  }
}

TEST(EpisodeTest, PlasticBagOutvotesTheMisreading) {
  const auto r = run_episode(load("av_plastic_bag"));
  ASSERT_EQ(r.records.size(), 5u);
  for (const auto& line : record_lines(r)) {
    EXPECT_EQ(line.substr(line.find('|')), "|decided|continue|0,1,2,3|1|0|-");
  }
}

TEST(EpisodeTest, MissedObstacleStillStops) {
  const auto r = run_episode(load("av_missed_obstacle"));
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.value, "stop");
    EXPECT_EQ(rec.supporters, (std::vector<ModuleId>{0, 1, 3, 4}));
    EXPECT_FALSE(rec.ground_truth_mismatch);
  }
}

TEST(EpisodeTest, TwoOutOfThreeFollowsTheGroundTruth) {
  const auto r = run_episode(load("voter_thresholds_2oo3"));
  EXPECT_EQ(record_lines(r), (std::vector<std::string>{
                                 "0|decided|alarm|0,1|1|0|-",
                                 "1|decided|quiet|1,2|1|0|-",
                                 "2|decided|alarm|0,1,2|1|0|-",
                                 "3|decided|quiet|0,1,2|1|0|-",
                                 "4|decided|alarm|1,2|1|0|-",
                             }));
}

TEST(EpisodeTest, CommonModeFailureIsFlaggedNotHidden) {
  const auto r = run_episode(load("common_mode_breach"));
  ASSERT_EQ(r.records.size(), 4u);
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.value, "continue");
    EXPECT_TRUE(rec.ground_truth_mismatch);
  }
  EXPECT_NE(r.decision_log().find("expects_violation=true"), std::string::npos);
}

TEST(EpisodeTest, SwarmAgreesDespiteTwoTraitors) {
  const Scenario s = load("swarm_formation");
  const auto r = run_episode(s);
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.verdict, VerdictKind::kDecided);
    EXPECT_EQ(rec.value, "wedge");
    EXPECT_LE(*rec.rounds, liveness_bound(s.f, s.timeout_rounds));
    EXPECT_LE(rec.view_changes, s.f + 1);
  }
  const std::set<ModuleId> honest = {0, 2, 3, 5, 6};
  expect_agreement(r, honest);
  expect_endorsed(r, s, honest);
  EXPECT_EQ(r.metrics.agreement_violations, 0u);
}

TEST(EpisodeTest, ReRunIsByteIdentical) {
  for (const char* name : {"swarm_formation", "supervisor_cycle", "fastpath_lane_keep"}) {
    const Scenario s = load(name);
    const auto a = run_episode(s);
    const auto b = run_episode(s);
    EXPECT_EQ(a.decision_log(), b.decision_log()) << name;
    EXPECT_EQ(a.events->lines(), b.events->lines()) << name;
    EXPECT_EQ(a.events->fingerprint(), b.events->fingerprint()) << name;

    const auto c = run_episode(s, RunOptions{EventLog::Mode::kDigestOnly});
    EXPECT_TRUE(c.events->lines().empty());
    EXPECT_EQ(c.events->fingerprint(), a.events->fingerprint()) << name;
  }
}

TEST(EpisodeTest, SeedChangesNetworkTiming) {
  Scenario s = load("fuzz_n4");
  s.network.jitter = 2;
  const auto a = run_episode(s);
  s.seed += 1;
  const auto b = run_episode(s);
  EXPECT_NE(a.events->fingerprint(), b.events->fingerprint());
}

TEST(EpisodeTest, AllHonestCommitsInThreeRounds) {
  const Scenario s = pbft_scenario("");
  const auto r = run_episode(s);
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.rounds, Round{3});
    EXPECT_EQ(rec.view_changes, 0u);
    EXPECT_EQ(rec.supporters, (std::vector<ModuleId>{0, 1, 2, 3}));
  }
}

TEST(EpisodeTest, SilentLeaderCostsATimeout) {
  const Scenario s = pbft_scenario("[module 0]\nprofile = silent\n");
  const auto r = run_episode(s);
  ASSERT_EQ(r.records.size(), 4u);
  // Module 0 leads frame 0; module 1 leads frame 1.
  EXPECT_EQ(r.records[0].value, "continue");
  EXPECT_GT(*r.records[0].rounds, Round{3});
  EXPECT_LE(*r.records[0].rounds, liveness_bound(s.f, s.timeout_rounds));
  EXPECT_EQ(r.records[0].view_changes, 1u);
  EXPECT_EQ(r.records[1].rounds, Round{3});
  EXPECT_EQ(r.records[1].view_changes, 0u);
  for (const auto& rec : r.records) EXPECT_EQ(rec.supporters, (std::vector<ModuleId>{1, 2, 3}));
  expect_agreement(r, {1, 2, 3});
  expect_endorsed(r, s, {1, 2, 3});
}

TEST(EpisodeTest, EquivocatingLeaderIsReplacedWithoutTimeout) {
  const Scenario s = pbft_scenario("[module 0]\nprofile = byzantine_equivocate:continue:brake\n");
  const auto r = run_episode(s);
  EXPECT_EQ(r.records[0].value, "continue");
  EXPECT_EQ(r.records[0].view_changes, 1u);
  EXPECT_LT(*r.records[0].rounds, Round{s.timeout_rounds});
  EXPECT_GT(r.metrics.leader_equivocations_seen, 0u);
  expect_agreement(r, {1, 2, 3});
  expect_endorsed(r, s, {1, 2, 3});
}

TEST(EpisodeTest, SupervisorIsolatesAndRestoresTheLiar) {
  const Scenario s = load("supervisor_cycle");
  const auto r = run_episode(s);
  ASSERT_EQ(r.supervisor_events.size(), 3u);
  EXPECT_EQ(r.supervisor_events[0].kind, SupervisorEventKind::kFlagged);
  EXPECT_EQ(r.supervisor_events[1].kind, SupervisorEventKind::kIsolated);
  EXPECT_EQ(r.supervisor_events[2].kind, SupervisorEventKind::kRecovered);
  for (const auto& e : r.supervisor_events) EXPECT_EQ(e.module, 3u);
  EXPECT_EQ(r.supervisor_events[0].round, r.supervisor_events[1].round);
  EXPECT_LT(r.supervisor_events[1].round, r.supervisor_events[2].round);

  bool back = false;
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.value, "continue");
    const bool has3 = std::count(rec.supporters.begin(), rec.supporters.end(), 3u) != 0;
    if (rec.frame < 10) EXPECT_FALSE(has3) << rec.frame;
    if (has3) back = true;
  }
  EXPECT_TRUE(back) << "the restarted module never supported a decision";

  // The restarted honest replica's Prepare shows up in a peer's quorum.
  bool counted = false;
  for (ModuleId peer = 0; peer < 3; ++peer) {
    for (const auto& v : r.vote_logs[peer]) {
      if (v.kind == MessageKind::kPrepare && v.frame >= 13 &&
          std::count(v.signers.begin(), v.signers.end(), 3u)) {
        counted = true;
      }
    }
  }
  EXPECT_TRUE(counted);
  expect_agreement(r, {0, 1, 2});
  expect_endorsed(r, s, {0, 1, 2});
}

TEST(EpisodeTest, FastPathUsesOneRoundUnlessSomeoneDissents) {
  const auto r = run_episode(load("fastpath_lane_keep"));
  EXPECT_EQ(record_lines(r), (std::vector<std::string>{
                                 "0|decided|keep|0,1,2,3|1|0|-",
                                 "1|decided|keep|0,1,2,3|1|0|-",
                                 "2|decided|keep|0,1,2,3|1|0|-",
                                 "3|decided|keep|0,1,3|2|0|-",
                                 "4|decided|keep|0,1,2,3|1|0|-",
                                 "5|decided|right|0,2,3|2|0|-",
                             }));
}

TEST(EpisodeTest, EquivocatingAnnouncerCannotSplitTheFastPath) {
  Scenario s = load("fastpath_lane_keep");
  s.modules[2].profile = ByzantineEquivocate{"keep", "left"};
  const auto r = run_episode(s);
  ASSERT_FALSE(r.metrics.agent_verdicts.empty());
  for (std::size_t frame = 0; frame < r.records.size(); ++frame) {
    std::set<std::string> verdicts;
    for (ModuleId m : {0u, 1u, 3u}) verdicts.insert(r.metrics.agent_verdicts.at(frame).at(m));
    EXPECT_EQ(verdicts.size(), 1u) << "frame " << frame;
    // Frame 5 leaves only two honest "right" votes: no majority of four.
    EXPECT_EQ(r.records[frame].verdict, frame < 5 ? VerdictKind::kDecided : VerdictKind::kNoQuorum) << frame;
  }
}

// Lock-step: no frame's records appear out of order, and each record's rounds
// fit the bound the observer is allowed to wait.
TEST(EpisodeTest, RecordsAreLockStepAndBounded) {
  for (const char* name : {"swarm_formation", "supervisor_cycle", "fuzz_n7"}) {
    const Scenario s = load(name);
    const auto r = run_episode(s);
    ASSERT_EQ(r.records.size(), s.frames());
    for (std::size_t i = 0; i < r.records.size(); ++i) {
      EXPECT_EQ(r.records[i].frame, i);
      if (r.records[i].rounds) EXPECT_LE(*r.records[i].rounds, liveness_bound(s.f, s.timeout_rounds));
    }
    for (const auto& v : r.violations) EXPECT_TRUE(v.empty() || s.faulty_count() > 0) << name;
  }
}

TEST(EpisodeTest, NoQuorumOnCriticalFrameFallsBackToSafeDefault) {
  const Scenario s = parse_scenario_text(
      "name = split\nf = 1\nn = 5\nmode = vote-only\nstrategy = majority\n\n"
      "[decision_space]\nlabels = continue brake stop\nsafe_default = brake\n\n"
      "[supervisor]\nenabled = false\n\n"
      "[observations]\n0 | stop | critical | stop stop continue continue brake\n"
      "1 | stop | - | stop stop continue continue brake\n");
  const auto r = run_episode(s);
  EXPECT_EQ(r.records[0].verdict, VerdictKind::kSafeMode);
  EXPECT_EQ(r.records[0].value, "brake");
  EXPECT_TRUE(r.records[0].safe_mode);
  EXPECT_EQ(r.records[1].verdict, VerdictKind::kNoQuorum);
  EXPECT_FALSE(r.records[1].value.has_value());
}

}  // namespace
}  // namespace bftguard
