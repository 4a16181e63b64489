// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "bftguard/quorum/decision.hpp"
#include "bftguard/quorum/quorum.hpp"

namespace bftguard {

enum class Mark { kAgreed, kDisagreed, kAbsent };

struct SupervisorConfig {
  std::uint32_t window = 10;
  double flag_threshold = 0.3;
  std::uint32_t restart_delay = 2;

  /// Throws std::invalid_argument for a zero window or a threshold outside
  /// (0, 1].
  void validate() const;
  friend bool operator==(const SupervisorConfig&, const SupervisorConfig&) = default;
};

/// What the observer saw from one module in a committed frame.
struct ModuleReport {
  ModuleId module = 0;
  std::optional<DecisionValue> value;
  bool equivocated = false;
};

Mark mark_for(const ModuleReport& report, const DecisionValue& committed);

/// Per-module ring buffer of the last W marks.
class DeviationLedger {
 public:
  DeviationLedger(std::uint32_t n, std::uint32_t window, double flag_threshold);

  void record(ModuleId module, Mark mark);
  void record_round(const DecisionValue& committed, std::span<const ModuleReport> reports);
  void reset(ModuleId module);

  const std::deque<Mark>& marks(ModuleId module) const { return marks_.at(module); }
  /// Modules with a full window whose (disagreed + absent) / W reaches the
  /// threshold, ascending.
  std::vector<ModuleId> detect_deviants() const;
  bool is_deviant(ModuleId module) const;

 private:
  std::uint32_t window_;
  double threshold_;
  std::vector<std::deque<Mark>> marks_;
};

enum class SupervisorEventKind { kFlagged, kIsolated, kRecovered };

std::string_view event_name(SupervisorEventKind kind) noexcept;

struct SupervisorEvent {
  Round round = 0;
  ModuleId module = 0;
  SupervisorEventKind kind = SupervisorEventKind::kFlagged;
};

struct SupervisorActions {
  std::vector<ModuleId> isolate;
  std::vector<ModuleId> restart;
};

/// Flags persistent deviants, isolates them within the budget
/// n - (2f+1), and schedules their restart. Quorum thresholds never change.
class Supervisor {
 public:
  Supervisor(QuorumConfig quorum, SupervisorConfig cfg);

  /// Feed one finished frame. `committed` is absent when no value was
  /// decided; such frames are not recorded.
  SupervisorActions after_frame(Frame frame, Round round, const std::optional<DecisionValue>& committed,
                                std::span<const ModuleReport> reports);

  /// Isolate outside the deviance path; false when over budget.
  bool try_isolate(ModuleId module, Frame frame, Round round);
  void mark_recovered(ModuleId module, Round round);

  std::size_t unavailable() const noexcept { return isolated_at_.size() + restarting_.size(); }
  bool is_isolated(ModuleId m) const { return isolated_at_.count(m) != 0; }
  bool is_restarting(ModuleId m) const { return restarting_.count(m) != 0; }
  const std::vector<SupervisorEvent>& events() const noexcept { return events_; }
  const std::vector<ModuleId>& refusals() const noexcept { return refusals_; }
  const DeviationLedger& ledger() const noexcept { return ledger_; }
  const SupervisorConfig& config() const noexcept { return cfg_; }

 private:
  QuorumConfig quorum_;
  SupervisorConfig cfg_;
  DeviationLedger ledger_;
  std::set<ModuleId> flagged_;
  std::map<ModuleId, Frame> isolated_at_;
  std::set<ModuleId> restarting_;
  std::vector<SupervisorEvent> events_;
  std::vector<ModuleId> refusals_;
};

}  // namespace bftguard
