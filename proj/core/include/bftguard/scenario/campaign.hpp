// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bftguard/quorum/crypto.hpp"
#include "bftguard/scenario/scenario.hpp"

namespace bftguard {

struct CampaignOptions {
  std::uint64_t episodes = 100;
  std::uint64_t seed = 0;
  std::uint32_t jobs = 1;
  /// Most faulty modules per episode; defaults to f.
  std::optional<std::uint32_t> fault_slots;
};

struct EpisodeOutcome {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  std::string faults;  // e.g. "1=silent 3=byzantine_fixed:brake"
  Digest decision_digest;
  Digest event_digest;
  std::uint64_t agreement_violations = 0;
  std::vector<std::string> liveness_failures;
  std::vector<std::uint64_t> rounds;        // per decided frame
  std::vector<std::uint64_t> view_changes;  // per frame
};

struct CampaignReport {
  std::string scenario;
  std::uint64_t episodes = 0;
  std::uint64_t seed = 0;
  std::uint64_t frames = 0;
  std::uint64_t agreement_violations = 0;
  std::uint64_t liveness_failures = 0;
  std::map<std::uint64_t, std::uint64_t> rounds_histogram;
  std::map<std::uint64_t, std::uint64_t> view_change_histogram;
  std::uint64_t max_rounds = 0;
  std::uint64_t max_view_changes = 0;
  std::uint64_t liveness_bound = 0;
  /// First failing episode: (episode seed, episode index) plus what failed.
  std::optional<std::pair<std::uint64_t, std::uint64_t>> first_failure;
  std::string first_failure_detail;
  Digest digest;

  bool passed() const noexcept { return agreement_violations == 0 && liveness_failures == 0; }
  std::string text() const;
};

std::uint64_t episode_seed(std::uint64_t campaign_seed, std::uint64_t index) noexcept;

/// Random fault placement (up to `slots` modules, any non-honest profile)
/// and random jitter and drops over `base`.
Scenario randomize_episode(const Scenario& base, std::uint64_t seed, std::uint32_t slots);

/// Runs one randomized episode and checks agreement, the liveness bound and
/// the view-change bound on every frame.
EpisodeOutcome run_fuzz_episode(const Scenario& base, std::uint64_t campaign_seed, std::uint64_t index,
                                std::uint32_t slots);

/// Throws ScenarioError when slots exceed f without expects_violation.
CampaignReport fuzz_campaign(const Scenario& base, const CampaignOptions& options);

}  // namespace bftguard
