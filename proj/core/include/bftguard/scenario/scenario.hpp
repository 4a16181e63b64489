// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bftguard/harness/profile.hpp"
#include "bftguard/quorum/decision.hpp"
#include "bftguard/quorum/quorum.hpp"
#include "bftguard/simnet/simnet.hpp"
#include "bftguard/supervisor/supervisor.hpp"
#include "bftguard/voter/voter.hpp"

namespace bftguard {

enum class ConsensusMode { kPbft, kVoteOnly };

std::string_view mode_name(ConsensusMode mode) noexcept;

struct Scenario {
  std::string name;
  std::uint32_t n = 4;
  std::uint32_t f = 1;
  /// Allows n > 3f+1 in pbft mode.
  bool n_override = false;
  std::shared_ptr<const DecisionSpace> space;
  std::vector<ModuleConfig> modules;
  ObservationTable observations;
  VoteStrategy strategy = Majority{};
  ConsensusMode mode = ConsensusMode::kPbft;
  NetworkPolicy network;
  /// Rebroadcast interval for unacknowledged protocol traffic; 0 picks 1
  /// when the network drops messages and off otherwise.
  std::uint32_t retransmit_interval = 0;
  std::uint32_t timeout_rounds = 10;
  /// Matching Replies the observer needs; defaults to f+1.
  std::optional<std::uint32_t> execution_threshold;
  std::uint32_t checkpoint_interval = 5;
  bool equivocation_fast_path = true;
  bool supervisor_enabled = true;
  SupervisorConfig supervisor;
  std::uint64_t seed = 0;
  /// Declares that more than f modules may fail, voiding the guarantees.
  bool expects_violation = false;

  QuorumConfig quorum() const { return QuorumConfig(n, f); }
  std::size_t frames() const noexcept { return observations.frames(); }
  std::uint32_t reply_threshold() const noexcept { return execution_threshold.value_or(f + 1); }
  std::uint32_t effective_retransmit() const noexcept {
    if (retransmit_interval != 0) return retransmit_interval;
    return network.drop_rate > 0.0 ? 1 : 0;
  }
  /// Modules whose profile counts against f.
  std::uint32_t faulty_count() const noexcept;

  friend bool operator==(const Scenario& a, const Scenario& b);
};

/// Every problem found while reading or validating a scenario.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// All semantic problems of an assembled scenario; empty when valid.
std::vector<std::string> validate_scenario(const Scenario& s);

Scenario parse_scenario_text(const std::string& text, const std::string& origin = "<text>");
Scenario parse_scenario(const std::filesystem::path& path);

/// Canonical text form; parse_scenario_text(to_text(s)) == s.
std::string to_text(const Scenario& s);

}  // namespace bftguard
