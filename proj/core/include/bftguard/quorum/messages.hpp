// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bftguard/quorum/crypto.hpp"
#include "bftguard/quorum/decision.hpp"
#include "bftguard/quorum/quorum.hpp"

namespace bftguard {

/// Wire kind tags. 1..9 are the replica protocol; the rest carry module
/// outputs, fast-path announcements and input dispatch.
enum class MessageKind : std::uint8_t {
  kPrePrepare = 1,
  kPrepare = 2,
  kCommit = 3,
  kViewChange = 4,
  kNewView = 5,
  kReply = 6,
  kStateRequest = 7,
  kStateSnapshot = 8,
  kCheckpointAttest = 9,
  kModuleOutput = 0x10,
  kAnnouncement = 0x11,
  kInput = 0x12,
};

std::string_view kind_name(MessageKind kind) noexcept;

/// Digest of a decision label's canonical form.
Digest value_digest(const DecisionValue& value);
Digest value_digest(std::string_view label);

// ---------------------------------------------------------------------------
// Module-level payloads

struct ModuleOutput {
  ModuleId module_id = 0;
  Frame frame = 0;
  DecisionValue value;
  double confidence = 0.0;
  AuthTag sig;

  std::vector<std::uint8_t> signed_bytes() const;
  bool verify(const Verifier& verifier) const;
};

ModuleOutput make_output(const Signer& signer, Frame frame, DecisionValue value, double confidence);

/// Fast-path announcement: the digest of a module's output, without the value.
struct Announcement {
  ModuleId module_id = 0;
  Frame frame = 0;
  Digest value_digest;
  AuthTag sig;

  std::vector<std::uint8_t> signed_bytes() const;
  bool verify(const Verifier& verifier) const;
};

Announcement make_announcement(const Signer& signer, Frame frame, const DecisionValue& value);

/// Observation dispatched by the environment to one module. Unsigned: it
/// never crosses between modules.
struct InputDispatch {
  Frame frame = 0;
  ModuleId module_id = 0;
  DecisionValue observation;

  std::vector<std::uint8_t> canonical_bytes() const;
};

/// Two verified outputs from one signer for one frame with different
/// digests.
struct EquivocationProof {
  ModuleOutput first;
  ModuleOutput second;

  bool verify(const Verifier& verifier) const;
};

std::optional<EquivocationProof> detect_equivocation(const ModuleOutput& a, const ModuleOutput& b,
                                                     const Verifier& verifier);

// ---------------------------------------------------------------------------
// Replica protocol

template <typename Body>
struct Signed {
  Body body;
  AuthTag tag;

  ModuleId signer() const noexcept { return tag.signer; }
};

struct PrePrepare {
  Frame frame = 0;
  ViewNumber view = 0;
  DecisionValue value;
  Digest digest;
};

struct Prepare {
  Frame frame = 0;
  ViewNumber view = 0;
  DecisionValue value;
  Digest digest;
  /// Leader's tag over PrePrepare{frame, view, value, digest}.
  AuthTag proposal_tag;
};

struct Commit {
  Frame frame = 0;
  ViewNumber view = 0;
  DecisionValue value;
  Digest digest;
};

struct PrepareCertificate {
  Frame frame = 0;
  ViewNumber view = 0;
  DecisionValue value;
  Digest digest;
  AuthTag proposal_tag;
  std::vector<Signed<Prepare>> prepares;
};

struct ViewChange {
  Frame frame = 0;
  ViewNumber new_view = 0;
  std::optional<PrepareCertificate> certificate;
};

struct NewView {
  Frame frame = 0;
  ViewNumber view = 0;
  std::vector<Signed<ViewChange>> view_changes;
  Signed<PrePrepare> proposal;
};

struct Reply {
  Frame frame = 0;
  ViewNumber view = 0;
  DecisionValue value;
  Digest digest;
};

struct StateRequest {
  ModuleId requester = 0;
  Frame frame = 0;
};

struct CheckpointAttest {
  Frame up_to_frame = 0;
  Digest log_digest;
};

struct Checkpoint {
  Frame up_to_frame = 0;
  Digest log_digest;
  std::vector<Signed<CheckpointAttest>> votes;
};

struct StateSnapshot {
  /// Absent when the responder has no stable checkpoint yet.
  std::optional<Checkpoint> checkpoint;
  std::vector<std::string> log;
};

using ProtocolMessage = std::variant<PrePrepare, Prepare, Commit, ViewChange, NewView, Reply, StateRequest,
                                     StateSnapshot, CheckpointAttest>;

struct SignedMessage {
  ProtocolMessage message;
  AuthTag tag;

  ModuleId signer() const noexcept { return tag.signer; }
  MessageKind kind() const noexcept;
};

MessageKind kind_of(const ProtocolMessage& m) noexcept;

std::vector<std::uint8_t> canonical_bytes(const PrePrepare& m);
std::vector<std::uint8_t> canonical_bytes(const Prepare& m);
std::vector<std::uint8_t> canonical_bytes(const Commit& m);
std::vector<std::uint8_t> canonical_bytes(const ViewChange& m);
std::vector<std::uint8_t> canonical_bytes(const NewView& m);
std::vector<std::uint8_t> canonical_bytes(const Reply& m);
std::vector<std::uint8_t> canonical_bytes(const StateRequest& m);
std::vector<std::uint8_t> canonical_bytes(const StateSnapshot& m);
std::vector<std::uint8_t> canonical_bytes(const CheckpointAttest& m);
std::vector<std::uint8_t> canonical_bytes(const ProtocolMessage& m);

/// Digest identifying a signed message on the wire (body plus tag).
Digest wire_digest(const SignedMessage& m);

template <typename Body>
Signed<Body> sign_body(const Signer& signer, Body body) {
  AuthTag tag = signer.sign(canonical_bytes(body));
  return Signed<Body>{std::move(body), tag};
}

template <typename Body>
bool verify_signed(const Signed<Body>& s, const Verifier& verifier) {
  return verifier.verify(s.tag, s.tag.signer, canonical_bytes(s.body));
}

SignedMessage sign_message(const Signer& signer, ProtocolMessage message);
bool verify_message(const SignedMessage& m, const Verifier& verifier);

/// Digest over the committed decision log prefix [0, labels.size()).
Digest log_digest(const std::vector<std::string>& labels);

}  // namespace bftguard
