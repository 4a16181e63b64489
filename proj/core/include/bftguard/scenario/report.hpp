// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bftguard/scenario/episode.hpp"

namespace bftguard {

/// A decision log read back from text.
struct ParsedDecisionLog {
  std::map<std::string, std::string> header;  // scenario, n, f, mode, ...
  std::vector<std::string> ground_truth;
  std::vector<DecisionRecord> records;
  std::vector<SupervisorEvent> events;
  std::vector<std::string> problems;  // malformed lines

  bool expects_violation() const;
  std::optional<std::uint32_t> n() const;
};

ParsedDecisionLog parse_decision_log(std::string_view text);

struct VerifyResult {
  /// Records whose flags or fields contradict each other or the header.
  std::vector<std::string> inconsistencies;
  /// Frames flagged with an agreement violation.
  std::vector<Frame> agreement_violations;
  bool violation_expected = false;

  bool clean() const noexcept {
    return inconsistencies.empty() && (agreement_violations.empty() || violation_expected);
  }
};

/// Recomputes every per-record invariant from the log alone.
VerifyResult verify_decision_log(const ParsedDecisionLog& log);

/// Counts of event-log lines by message kind.
std::map<std::string, std::uint64_t> summarize_event_log(std::string_view text);

/// Per-frame table, per-module agreement rates and supervisor rows.
std::string render_report(const ParsedDecisionLog& log, const std::map<std::string, std::uint64_t>& event_counts = {});

}  // namespace bftguard
