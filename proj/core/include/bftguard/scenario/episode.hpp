// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bftguard/consensus/replica.hpp"
#include "bftguard/scenario/scenario.hpp"
#include "bftguard/simnet/simnet.hpp"
#include "bftguard/supervisor/supervisor.hpp"

namespace bftguard {

enum class VerdictKind { kDecided, kNoQuorum, kSafeMode };

std::string_view verdict_name(VerdictKind kind) noexcept;

/// The observer's ledger entry for one frame.
struct DecisionRecord {
  Frame frame = 0;
  VerdictKind verdict = VerdictKind::kNoQuorum;
  std::optional<std::string> value;
  std::vector<ModuleId> supporters;
  std::optional<Round> rounds;
  std::uint64_t view_changes = 0;
  bool agreement_violation = false;
  bool safe_mode = false;
  bool ground_truth_mismatch = false;

  friend bool operator==(const DecisionRecord&, const DecisionRecord&) = default;
};

/// `frame|verdict|value|supporters|rounds|view_changes|flags`.
std::string format_record(const DecisionRecord& r);
/// `round|SUPERVISOR|module|event`.
std::string format_event(const SupervisorEvent& e);

struct EpisodeMetrics {
  Round total_rounds = 0;
  std::uint64_t messages_sent = 0;
  std::uint64_t messages_dropped = 0;
  std::uint64_t agreement_violations = 0;
  std::uint64_t leader_equivocations_seen = 0;
  /// Fast-path mode: [frame][module], each module's own verdict label ("-" when it
  /// reached none), for cross-module uniformity checks.
  std::vector<std::vector<std::string>> agent_verdicts;
};

struct EpisodeResult {
  std::string scenario_name;
  std::vector<DecisionRecord> records;
  std::vector<SupervisorEvent> supervisor_events;
  /// Decision log lines in emission order (headers, records, supervisor rows).
  std::vector<std::string> decision_lines;
  std::shared_ptr<EventLog> events;
  /// Per module: every vote record of every incarnation of its replica.
  std::vector<std::vector<VoteRecord>> vote_logs;
  /// Per module: committed label per frame, as the replica reported it.
  std::vector<std::map<Frame, std::string>> commits;
  /// Per module: protocol violations its replica observed.
  std::vector<std::vector<std::string>> violations;
  EpisodeMetrics metrics;

  std::string decision_log() const;
  Digest decision_digest() const;
};

struct RunOptions {
  EventLog::Mode event_mode = EventLog::Mode::kKeepLines;
};

/// Runs the lock-step frame loop. Liveness failures become NoQuorum or
/// SafeMode records; nothing here throws for protocol outcomes.
EpisodeResult run_episode(const Scenario& scenario, const RunOptions& options = {});

/// Upper bound on rounds until the observer finalizes a frame.
inline std::uint64_t liveness_bound(std::uint32_t f, std::uint32_t timeout_rounds) {
  return static_cast<std::uint64_t>(f + 1) * timeout_rounds + 3;
}

}  // namespace bftguard
