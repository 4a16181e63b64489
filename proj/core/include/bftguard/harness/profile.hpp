// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bftguard/quorum/decision.hpp"
#include "bftguard/quorum/quorum.hpp"

namespace bftguard {

struct Honest {
  friend bool operator==(const Honest&, const Honest&) = default;
};
struct DiverseHonest {
  std::uint64_t perturb_seed = 0;
  double error_rate = 0.0;
  friend bool operator==(const DiverseHonest&, const DiverseHonest&) = default;
};
struct Crash {
  Frame at_frame = 0;
  friend bool operator==(const Crash&, const Crash&) = default;
};
struct Silent {
  friend bool operator==(const Silent&, const Silent&) = default;
};
struct Slow {
  std::uint32_t delay_rounds = 1;
  friend bool operator==(const Slow&, const Slow&) = default;
};
struct ByzantineFixed {
  std::string bad_label;
  friend bool operator==(const ByzantineFixed&, const ByzantineFixed&) = default;
};
struct ByzantineRandom {
  std::uint64_t seed = 0;
  friend bool operator==(const ByzantineRandom&, const ByzantineRandom&) = default;
};
struct ByzantineEquivocate {
  std::string label_a;
  std::string label_b;
  friend bool operator==(const ByzantineEquivocate&, const ByzantineEquivocate&) = default;
};

using FaultProfile =
    std::variant<Honest, DiverseHonest, Crash, Silent, Slow, ByzantineFixed, ByzantineRandom, ByzantineEquivocate>;

/// Throws std::invalid_argument when parameters are out of range or name
/// labels outside the space.
void validate_profile(const FaultProfile& profile, const DecisionSpace& space);

/// Profiles that actively lie (as opposed to failing by omission or delay).
bool is_byzantine(const FaultProfile& profile) noexcept;
/// Anything but plain Honest counts against the tolerated f.
bool counts_against_f(const FaultProfile& profile) noexcept;

/// Scenario-file spelling, e.g. "byzantine_fixed:brake" or "diverse:7:0.1".
std::string to_string(const FaultProfile& profile);
/// Inverse of to_string. Throws std::invalid_argument.
FaultProfile parse_profile(const std::string& text);

enum class RestartPolicy { kSame, kHonest };

struct ModuleConfig {
  FaultProfile profile = Honest{};
  double base_confidence = 0.9;
  double adversary_confidence = 1.0;
  RestartPolicy on_restart = RestartPolicy::kSame;
  /// Recipients shown label_a by an equivocator; empty picks the lower half.
  std::vector<ModuleId> equivocate_split;

  friend bool operator==(const ModuleConfig&, const ModuleConfig&) = default;
};

/// Per-frame observations: what each module perceives, plus the ground
/// truth and whether the frame is action-critical.
class ObservationTable {
 public:
  struct Row {
    std::string ground_truth;
    bool critical = false;
    std::vector<std::string> observed;  // indexed by module id

    friend bool operator==(const Row&, const Row&) = default;
  };

  ObservationTable() = default;
  explicit ObservationTable(std::vector<Row> rows) : rows_(std::move(rows)) {}

  void add(Row row) { rows_.push_back(std::move(row)); }
  std::size_t frames() const noexcept { return rows_.size(); }
  const Row& row(Frame frame) const { return rows_.at(frame); }
  const std::vector<Row>& rows() const noexcept { return rows_; }

  DecisionValue observed(const DecisionSpace& space, Frame frame, ModuleId module) const;
  DecisionValue ground_truth(const DecisionSpace& space, Frame frame) const;

  /// Collects every problem rather than stopping at the first.
  std::vector<std::string> problems(const DecisionSpace& space, std::uint32_t n) const;

  friend bool operator==(const ObservationTable&, const ObservationTable&) = default;

 private:
  std::vector<Row> rows_;
};

enum class ModuleStatus { kActive, kIsolated, kRestarting };

std::string_view status_name(ModuleStatus s) noexcept;

class InvalidTransition : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Lifecycle of one module: active -> isolated -> restarting -> active.
class ModuleState {
 public:
  ModuleState(ModuleId id, FaultProfile profile) : id_(id), profile_(std::move(profile)) {}

  ModuleId id() const noexcept { return id_; }
  const FaultProfile& profile() const noexcept { return profile_; }
  ModuleStatus status() const noexcept { return status_; }
  std::optional<Frame> last_committed_frame() const noexcept { return last_committed_; }

  void note_commit(Frame frame);
  void isolate();
  void begin_restart(std::optional<FaultProfile> replacement = std::nullopt);
  /// Called once a snapshot (or genesis) has been applied.
  void complete_restart(std::optional<Frame> snapshot_frame);

 private:
  ModuleId id_;
  FaultProfile profile_;
  ModuleStatus status_ = ModuleStatus::kActive;
  std::optional<Frame> last_committed_;
};

/// Value-semantics form of ModuleState::begin_restart.
ModuleState restart_module(ModuleState state);

}  // namespace bftguard
