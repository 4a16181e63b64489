// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "bftguard/quorum/crypto.hpp"
#include "bftguard/quorum/messages.hpp"
#include "bftguard/quorum/quorum.hpp"

namespace bftguard {

/// Everything that can travel through the simulated network.
using Payload = std::variant<SignedMessage, ModuleOutput, Announcement, InputDispatch>;

MessageKind payload_kind(const Payload& p) noexcept;
Digest payload_digest(const Payload& p);

/// Frame the payload belongs to, for frame-scoped kinds.
std::optional<Frame> payload_frame(const Payload& p) noexcept;

struct Envelope {
  NodeId from = 0;
  NodeId to = 0;
  Payload payload;
  Round send_round = 0;
  Round deliver_round = 0;
  std::uint64_t sequence = 0;
};

struct Partition {
  Round from_round = 0;
  Round to_round = 0;  // inclusive
  std::set<NodeId> side_a;
  std::set<NodeId> side_b;

  bool separates(NodeId x, NodeId y, Round at) const noexcept;
  friend bool operator==(const Partition&, const Partition&) = default;
};

struct NetworkPolicy {
  std::uint32_t base_delay = 1;
  std::uint32_t jitter = 0;
  double drop_rate = 0.0;
  /// After this many drops of the same payload on the same link the next
  /// copy gets through. 0 disables the bound.
  std::uint32_t max_consecutive_drops = 0;
  std::vector<Partition> partitions;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
  friend bool operator==(const NetworkPolicy&, const NetworkPolicy&) = default;
};

/// Line-delimited `round|from|to|kind|digest` records of every delivery.
/// Either keeps the lines or only a running digest of them.
class EventLog {
 public:
  enum class Mode { kKeepLines, kDigestOnly };

  explicit EventLog(Mode mode = Mode::kKeepLines) : mode_(mode) {}

  void append(std::string line);
  const std::vector<std::string>& lines() const noexcept { return lines_; }
  std::string text() const;
  Digest fingerprint() const { return stream_.current(); }
  std::uint64_t size() const noexcept { return count_; }

 private:
  Mode mode_;
  std::vector<std::string> lines_;
  DigestStream stream_;
  std::uint64_t count_ = 0;
};

std::string node_name(NodeId id);

/// Discrete-round network. Single owner; one per episode.
class Network {
 public:
  explicit Network(NetworkPolicy policy, std::shared_ptr<EventLog> log = nullptr);

  Round round() const noexcept { return round_; }

  /// Queues one envelope per recipient. `extra_delay` models slow senders.
  void send(NodeId from, const std::vector<NodeId>& to, const Payload& payload, std::uint32_t extra_delay = 0);
  void send(NodeId from, NodeId to, const Payload& payload, std::uint32_t extra_delay = 0) {
    send(from, std::vector<NodeId>{to}, payload, extra_delay);
  }

  /// Increments the round counter and returns the envelopes due at the new
  /// round, ordered by (deliver_round, send_round, from, to, sequence).
  std::vector<Envelope> advance_round();

  /// Envelopes already due at the current round (zero-delay sends made
  /// while processing this round).
  std::vector<Envelope> collect_due();

  /// Fault containment: envelopes from or to a quarantined node are
  /// discarded at send time.
  void quarantine(NodeId node) { quarantined_.insert(node); }
  void release(NodeId node) { quarantined_.erase(node); }
  bool is_quarantined(NodeId node) const { return quarantined_.count(node) != 0; }

  std::size_t pending() const noexcept { return queue_.size(); }
  std::uint64_t sent_count() const noexcept { return sequence_; }
  std::uint64_t dropped_count() const noexcept { return dropped_; }
  const NetworkPolicy& policy() const noexcept { return policy_; }

 private:
  using Key = std::tuple<Round, Round, NodeId, NodeId, std::uint64_t>;

  std::vector<Envelope> take_due(Round up_to);
  void record(const Envelope& e);

  NetworkPolicy policy_;
  std::shared_ptr<EventLog> log_;
  Round round_ = 0;
  std::uint64_t sequence_ = 0;
  std::uint64_t dropped_ = 0;
  std::map<Key, Envelope> queue_;
  std::set<NodeId> quarantined_;
  std::map<std::tuple<NodeId, NodeId, Digest>, std::uint32_t> drop_streaks_;
};

/// Consensus-instance clock used for timeout decisions.
struct InstanceClock {
  Round start_round = 0;
  bool decided = false;
};

enum class TimeoutStatus { kQuiet, kFired };

/// Fires iff the instance is undecided and (now - start) >= timeout_rounds.
TimeoutStatus timeout_check(const InstanceClock& instance, Round now, std::uint32_t timeout_rounds) noexcept;

/// splitmix64 finalizer; the network's pure per-envelope randomness.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace bftguard
