// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include "bftguard/supervisor/supervisor.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace bftguard {

void SupervisorConfig::validate() const {
  if (window == 0) throw std::invalid_argument("supervisor window must be positive");
  if (!(flag_threshold > 0.0 && flag_threshold <= 1.0)) {
    throw std::invalid_argument("flag threshold must lie in (0, 1]");
  }
}

Mark mark_for(const ModuleReport& report, const DecisionValue& committed) {
  if (report.equivocated) return Mark::kDisagreed;
  if (!report.value) return Mark::kAbsent;
  return *report.value == committed ? Mark::kAgreed : Mark::kDisagreed;
}

DeviationLedger::DeviationLedger(std::uint32_t n, std::uint32_t window, double flag_threshold)
    : window_(window), threshold_(flag_threshold), marks_(n) {
  SupervisorConfig{window, flag_threshold, 0}.validate();
}

void DeviationLedger::record(ModuleId module, Mark mark) {
  auto& ring = marks_.at(module);
  ring.push_back(mark);
  if (ring.size() > window_) ring.pop_front();
}

void DeviationLedger::record_round(const DecisionValue& committed, std::span<const ModuleReport> reports) {
  for (const auto& r : reports) record(r.module, mark_for(r, committed));
}

void DeviationLedger::reset(ModuleId module) { marks_.at(module).clear(); }

bool DeviationLedger::is_deviant(ModuleId module) const {
  const auto& ring = marks_.at(module);
  if (ring.size() < window_) return false;
  const auto bad = std::count_if(ring.begin(), ring.end(), [](Mark m) { return m != Mark::kAgreed; });
  return static_cast<double>(bad) / static_cast<double>(window_) >= threshold_;
}

std::vector<ModuleId> DeviationLedger::detect_deviants() const {
  std::vector<ModuleId> out;
  for (ModuleId m = 0; m < marks_.size(); ++m) {
    if (is_deviant(m)) out.push_back(m);
  }
  return out;
}

std::string_view event_name(SupervisorEventKind kind) noexcept {
  switch (kind) {
    case SupervisorEventKind::kFlagged: return "flagged";
    case SupervisorEventKind::kIsolated: return "isolated";
    case SupervisorEventKind::kRecovered: return "recovered";
  }
  return "unknown";
}

Supervisor::Supervisor(QuorumConfig quorum, SupervisorConfig cfg)
    : quorum_(quorum), cfg_(cfg), ledger_(quorum.n(), cfg.window, cfg.flag_threshold) {}

bool Supervisor::try_isolate(ModuleId module, Frame frame, Round round) {
  if (isolated_at_.count(module) || restarting_.count(module)) return false;
  if (unavailable() >= quorum_.isolation_budget()) {
    refusals_.push_back(module);
    return false;
  }
  isolated_at_.emplace(module, frame);
  events_.push_back(SupervisorEvent{round, module, SupervisorEventKind::kIsolated});
  return true;
}

SupervisorActions Supervisor::after_frame(Frame frame, Round round, const std::optional<DecisionValue>& committed,
                                          std::span<const ModuleReport> reports) {
  SupervisorActions actions;
  if (committed) {
    for (const auto& r : reports) {
      if (!isolated_at_.count(r.module) && !restarting_.count(r.module)) ledger_.record(r.module, mark_for(r, *committed));
    }
  }
  for (ModuleId m : ledger_.detect_deviants()) {
    if (isolated_at_.count(m) || restarting_.count(m)) continue;
    if (flagged_.insert(m).second) events_.push_back(SupervisorEvent{round, m, SupervisorEventKind::kFlagged});
    if (try_isolate(m, frame, round)) actions.isolate.push_back(m);
  }
  for (auto it = isolated_at_.begin(); it != isolated_at_.end();) {
    if (frame - it->second >= cfg_.restart_delay) {
      actions.restart.push_back(it->first);
      restarting_.insert(it->first);
      ledger_.reset(it->first);
      it = isolated_at_.erase(it);
    } else {
      ++it;
    }
  }
  return actions;
}

void Supervisor::mark_recovered(ModuleId module, Round round) {
  if (!restarting_.erase(module)) {
    throw std::logic_error("module " + std::to_string(module) + " is not restarting");
  }
  flagged_.erase(module);
  events_.push_back(SupervisorEvent{round, module, SupervisorEventKind::kRecovered});
}

}  // namespace bftguard
