// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include "bftguard/simnet/simnet.hpp"

#include <sstream>
#include <stdexcept>

namespace bftguard {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

namespace {

double unit_draw(std::uint64_t seed, std::uint64_t index, std::uint64_t salt) {
  std::uint64_t h = mix64(seed ^ mix64(index ^ mix64(salt)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace

MessageKind payload_kind(const Payload& p) noexcept {
  struct {
    MessageKind operator()(const SignedMessage& m) const { return m.kind(); }
    MessageKind operator()(const ModuleOutput&) const { return MessageKind::kModuleOutput; }
    MessageKind operator()(const Announcement&) const { return MessageKind::kAnnouncement; }
    MessageKind operator()(const InputDispatch&) const { return MessageKind::kInput; }
  } visitor;
  return std::visit(visitor, p);
}

Digest payload_digest(const Payload& p) {
  struct {
    Digest operator()(const SignedMessage& m) const { return wire_digest(m); }
    Digest operator()(const ModuleOutput& o) const { return digest(o.signed_bytes()); }
    Digest operator()(const Announcement& a) const { return digest(a.signed_bytes()); }
    Digest operator()(const InputDispatch& i) const { return digest(i.canonical_bytes()); }
  } visitor;
  return std::visit(visitor, p);
}

std::optional<Frame> payload_frame(const Payload& p) noexcept {
  struct {
    std::optional<Frame> operator()(const SignedMessage& m) const {
      return std::visit(
          [](const auto& body) -> std::optional<Frame> {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, StateSnapshot> || std::is_same_v<T, CheckpointAttest> ||
                          std::is_same_v<T, StateRequest>) {
              return std::nullopt;
            } else {
              return body.frame;
            }
          },
          m.message);
    }
    std::optional<Frame> operator()(const ModuleOutput& o) const { return o.frame; }
    std::optional<Frame> operator()(const Announcement& a) const { return a.frame; }
    std::optional<Frame> operator()(const InputDispatch& i) const { return i.frame; }
  } visitor;
  return std::visit(visitor, p);
}

bool Partition::separates(NodeId x, NodeId y, Round at) const noexcept {
  if (at < from_round || at > to_round) return false;
  bool xa = side_a.count(x) != 0, xb = side_b.count(x) != 0;
  bool ya = side_a.count(y) != 0, yb = side_b.count(y) != 0;
  return (xa && yb) || (xb && ya);
}

void NetworkPolicy::validate() const {
  if (!(drop_rate >= 0.0 && drop_rate <= 1.0)) throw std::invalid_argument("drop_rate must be in [0,1]");
  for (const auto& p : partitions) {
    if (p.to_round < p.from_round) throw std::invalid_argument("partition interval is reversed");
    for (NodeId a : p.side_a) {
      if (p.side_b.count(a)) throw std::invalid_argument("partition sides must be disjoint");
    }
  }
}

void EventLog::append(std::string line) {
  line.push_back('\n');
  stream_.update(line);
  ++count_;
  if (mode_ == Mode::kKeepLines) {
    line.pop_back();
    lines_.push_back(std::move(line));
  }
}

std::string EventLog::text() const {
  std::string out;
  for (const auto& l : lines_) {
    out += l;
    out.push_back('\n');
  }
  return out;
}

std::string node_name(NodeId id) {
  if (id == kObserverNode) return "obs";
  if (id == kEnvironmentNode) return "env";
  return std::to_string(id);
}

Network::Network(NetworkPolicy policy, std::shared_ptr<EventLog> log)
    : policy_(std::move(policy)), log_(std::move(log)) {
  policy_.validate();
}

void Network::send(NodeId from, const std::vector<NodeId>& to, const Payload& payload, std::uint32_t extra_delay) {
  if (to.empty()) return;
  if (quarantined_.count(from)) return;
  std::optional<Digest> pd;
  for (NodeId dest : to) {
    std::uint64_t index = sequence_++;
    if (quarantined_.count(dest)) continue;
    bool partitioned = false;
    for (const auto& part : policy_.partitions) {
      if (part.separates(from, dest, round_)) {
        partitioned = true;
        break;
      }
    }
    if (partitioned) {
      ++dropped_;
      continue;
    }
    if (policy_.drop_rate > 0.0) {
      bool drop = unit_draw(policy_.seed, index, 0xD209) < policy_.drop_rate;
      if (policy_.max_consecutive_drops > 0) {
        if (!pd) pd = payload_digest(payload);
        auto& streak = drop_streaks_[{from, dest, *pd}];
        if (drop && streak >= policy_.max_consecutive_drops) drop = false;
        streak = drop ? streak + 1 : 0;
      }
      if (drop) {
        ++dropped_;
        continue;
      }
    }
    std::uint32_t jitter = 0;
    if (policy_.jitter > 0) {
      jitter = static_cast<std::uint32_t>(mix64(policy_.seed ^ mix64(index ^ 0x717E)) % (policy_.jitter + 1));
    }
    Envelope e{from, dest, payload, round_, round_ + policy_.base_delay + jitter + extra_delay, index};
    queue_.emplace(Key{e.deliver_round, e.send_round, e.from, e.to, e.sequence}, std::move(e));
  }
}

std::vector<Envelope> Network::take_due(Round up_to) {
  std::vector<Envelope> out;
  while (!queue_.empty()) {
    auto it = queue_.begin();
    if (std::get<0>(it->first) > up_to) break;
    record(it->second);
    out.push_back(std::move(it->second));
    queue_.erase(it);
  }
  return out;
}

std::vector<Envelope> Network::advance_round() {
  ++round_;
  return take_due(round_);
}

std::vector<Envelope> Network::collect_due() { return take_due(round_); }

void Network::record(const Envelope& e) {
  if (!log_) return;
  std::string line;
  line.reserve(100);
  line += std::to_string(round_);
  line += '|';
  line += node_name(e.from);
  line += '|';
  line += node_name(e.to);
  line += '|';
  line += kind_name(payload_kind(e.payload));
  line += '|';
  line += payload_digest(e.payload).hex();
  log_->append(std::move(line));
}

TimeoutStatus timeout_check(const InstanceClock& instance, Round now, std::uint32_t timeout_rounds) noexcept {
  if (instance.decided || now < instance.start_round) return TimeoutStatus::kQuiet;
  return (now - instance.start_round) >= timeout_rounds ? TimeoutStatus::kFired : TimeoutStatus::kQuiet;
}

}  // namespace bftguard
