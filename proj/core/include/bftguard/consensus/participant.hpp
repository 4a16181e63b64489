// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bftguard/quorum/messages.hpp"
#include "bftguard/quorum/quorum.hpp"

namespace bftguard {

struct Outbound {
  std::vector<NodeId> to;
  SignedMessage message;
};

struct CommitEvent {
  Frame frame = 0;
  ViewNumber view = 0;
  DecisionValue value;
  Round round = 0;
};

/// Everything one transition of a participant produced.
struct Step {
  std::vector<Outbound> out;
  std::optional<CommitEvent> committed;
  /// Set when a state snapshot was applied; carries the resume point.
  std::optional<std::optional<Frame>> state_transferred;
};

/// A replica as the event loop sees it: deterministic transitions driven
/// only by its own output, delivered messages and the round clock.
class Participant {
 public:
  virtual ~Participant() = default;

  virtual ModuleId id() const noexcept = 0;

  /// Lock-step frame boundary. `own` is absent when the module produced
  /// no output for this frame.
  virtual void start_frame(Frame frame, const std::optional<ModuleOutput>& own, Round now, Step& step) = 0;
  virtual void on_message(const SignedMessage& message, Round now, Step& step) = 0;
  virtual void on_tick(Round now, Step& step) = 0;

  /// Ask peers for a state snapshot (restart path).
  virtual void begin_state_transfer(Frame current_frame, Round now, Step& step) = 0;

  virtual std::unique_ptr<Participant> clone() const = 0;
};

inline ModuleId leader_of(Frame frame, ViewNumber view, std::uint32_t n) noexcept {
  return static_cast<ModuleId>((frame + view) % n);
}

}  // namespace bftguard
