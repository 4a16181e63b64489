// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <variant>
#include <vector>

#include "bftguard/harness/profile.hpp"
#include "bftguard/quorum/crypto.hpp"
#include "bftguard/quorum/messages.hpp"

namespace bftguard {

/// Seeded stream with portable bounded draws (std distributions are not
/// specified bit-for-bit across standard libraries).
class ModuleRng {
 public:
  explicit ModuleRng(std::seed_seq& seq) : engine_(seq) {}
  ModuleRng(std::initializer_list<std::uint64_t> words);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform in [0, 1).
  double unit();

 private:
  std::mt19937_64 engine_;
};

struct NoOutput {};
struct EquivocatedOutputs {
  ModuleOutput a;
  ModuleOutput b;
};
using Production = std::variant<NoOutput, ModuleOutput, EquivocatedOutputs>;

double confidence_of(const ModuleConfig& cfg) noexcept;

/// A simulated AI module: turns its observation into a signed output as its
/// fault profile dictates.
class DecisionModule {
 public:
  DecisionModule(ModuleId id, ModuleConfig cfg, Signer signer, std::shared_ptr<const DecisionSpace> space,
                 std::uint64_t scenario_seed);

  ModuleId id() const noexcept { return state_.id(); }
  const ModuleState& state() const noexcept { return state_; }
  ModuleState& state() noexcept { return state_; }
  const ModuleConfig& config() const noexcept { return cfg_; }
  const FaultProfile& profile() const noexcept { return state_.profile(); }

  /// Deterministic in (scenario seed, module id, profile, frame). Throws
  /// std::invalid_argument for an observation outside the space and
  /// InvalidTransition when the module is not active.
  Production produce_output(Frame frame, const DecisionValue& observation) const;

  /// Isolated -> restarting, applying the configured restart policy.
  void restart();

 private:
  ModuleConfig cfg_;
  Signer signer_;
  std::shared_ptr<const DecisionSpace> space_;
  std::uint64_t scenario_seed_;
  ModuleState state_;
};

}  // namespace bftguard
