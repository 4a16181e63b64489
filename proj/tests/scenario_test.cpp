// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "bftguard/scenario/scenario.hpp"

namespace bftguard {
namespace {

const std::filesystem::path kScenarioDir = BFTGUARD_SCENARIO_DIR;

const char* const kMinimal = R"(name = tiny
f = 1
mode = pbft

[decision_space]
labels = continue brake
safe_default = brake

[observations]
0..1 | continue | - | 4*continue
2 | brake | critical | brake brake brake continue
)";

std::vector<std::string> problems_of(const std::string& text) {
  try {
    parse_scenario_text(text);
  } catch (const ScenarioError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& needle) {
  return std::any_of(problems.begin(), problems.end(),
                     [&](const std::string& p) { return p.find(needle) != std::string::npos; });
}

TEST(ScenarioTest, ParsesMinimalScenario) {
  const Scenario s = parse_scenario_text(kMinimal);
  EXPECT_EQ(s.name, "tiny");
  EXPECT_EQ(s.n, 4u);  // defaults to 3f+1
  EXPECT_EQ(s.frames(), 3u);
  EXPECT_EQ(s.modules.size(), 4u);
  EXPECT_EQ(s.reply_threshold(), 2u);
  EXPECT_EQ(s.faulty_count(), 0u);
  EXPECT_EQ(s.space->safe_default().label(), "brake");
}

TEST(ScenarioTest, EveryBundledScenarioParsesAndRoundTrips) {
  std::size_t seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kScenarioDir)) {
    if (entry.path().extension() != ".scn") continue;
    ++seen;
    const Scenario s = parse_scenario(entry.path());
    EXPECT_EQ(s.name, entry.path().stem().string());
    const Scenario again = parse_scenario_text(to_text(s));
    EXPECT_TRUE(again == s) << entry.path();
    EXPECT_EQ(to_text(again), to_text(s));
  }
  EXPECT_GE(seen, 10u);
}

TEST(ScenarioTest, RefusesTooFewModules) {
  std::string text = kMinimal;
  text.replace(text.find("f = 1"), 5, "f = 1\nn = 3");
  const auto p = problems_of(text);
  EXPECT_TRUE(mentions(p, "n < 3f+1")) << ::testing::PrintToString(p);
}

TEST(ScenarioTest, LargerPbftEnsembleNeedsOverride) {
  std::string text = kMinimal;
  text.replace(text.find("f = 1"), 5, "f = 1\nn = 5");
  EXPECT_TRUE(mentions(problems_of(text), "n_override"));
}

TEST(ScenarioTest, UnknownLabelNamesTheFrame) {
  std::string text = kMinimal;
  text.replace(text.find("brake brake brake continue"), 26, "brake brake swerve continue");
  const auto p = problems_of(text);
  EXPECT_TRUE(mentions(p, "frame 2: observation 'swerve'")) << ::testing::PrintToString(p);
}

TEST(ScenarioTest, CollectsEveryProblem) {
  const std::string text = R"(name = broken
f = 1
frobnicate = 3
timeout_rounds = soon

[decision_space]
labels = continue brake
safe_default = brake

[module 7]
profile = honest

[observations]
0 | continue | maybe | 4*continue
)";
  const auto p = problems_of(text);
  EXPECT_TRUE(mentions(p, "unknown key 'frobnicate'"));
  EXPECT_TRUE(mentions(p, "expects a number"));
  EXPECT_TRUE(mentions(p, "module 7 configured but n = 4"));
  EXPECT_TRUE(mentions(p, "critical column"));
  EXPECT_GE(p.size(), 4u);
  EXPECT_TRUE(mentions(p, "<text>:3:")) << "line numbers are reported";
}

TEST(ScenarioTest, TooManyFaultsNeedExplicitOptIn) {
  std::string text = kMinimal;
  text.replace(text.find("[observations]"), 14,
               "[module 0]\nprofile = byzantine_fixed:brake\n\n[module 1]\nprofile = crash:1\n\n[observations]");
  EXPECT_TRUE(mentions(problems_of(text), "exceed f"));
  text.replace(text.find("mode = pbft"), 11, "mode = pbft\nexpects_violation = true");
  const Scenario s = parse_scenario_text(text);
  EXPECT_EQ(s.faulty_count(), 2u);
  EXPECT_TRUE(s.expects_violation);
}

TEST(ScenarioTest, MissingFileIsReported) {
  EXPECT_ANY_THROW(parse_scenario(kScenarioDir / "does_not_exist.scn"));
}

}  // namespace
}  // namespace bftguard
