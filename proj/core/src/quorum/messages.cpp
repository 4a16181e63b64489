// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include "bftguard/quorum/messages.hpp"

#include "bftguard/quorum/codec.hpp"

namespace bftguard {
namespace {

void put_tag(ByteWriter& w, const AuthTag& t) { w.u32(t.signer).fixed(t.payload_digest.bytes).fixed(t.tag); }

template <typename Body>
void put_signed(ByteWriter& w, const Signed<Body>& s) {
  w.blob(canonical_bytes(s.body));
  put_tag(w, s.tag);
}

void put_certificate(ByteWriter& w, const PrepareCertificate& c) {
  w.u64(c.frame).u64(c.view).str(c.value.label()).fixed(c.digest.bytes);
  put_tag(w, c.proposal_tag);
  w.u32(static_cast<std::uint32_t>(c.prepares.size()));
  for (const auto& p : c.prepares) put_signed(w, p);
}

ByteWriter header(MessageKind k) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(k));
  return w;
}

}  // namespace

std::string_view kind_name(MessageKind kind) noexcept {
  switch (kind) {
    case MessageKind::kPrePrepare: return "PRE_PREPARE";
    case MessageKind::kPrepare: return "PREPARE";
    case MessageKind::kCommit: return "COMMIT";
    case MessageKind::kViewChange: return "VIEW_CHANGE";
    case MessageKind::kNewView: return "NEW_VIEW";
    case MessageKind::kReply: return "REPLY";
    case MessageKind::kStateRequest: return "STATE_REQUEST";
    case MessageKind::kStateSnapshot: return "STATE_SNAPSHOT";
    case MessageKind::kCheckpointAttest: return "CHECKPOINT";
    case MessageKind::kModuleOutput: return "OUTPUT";
    case MessageKind::kAnnouncement: return "ANNOUNCE";
    case MessageKind::kInput: return "INPUT";
  }
  return "UNKNOWN";
}

Digest value_digest(std::string_view label) {
  ByteWriter w;
  w.str(label);
  return digest(w.bytes());
}

Digest value_digest(const DecisionValue& value) { return value_digest(value.label()); }

std::vector<std::uint8_t> ModuleOutput::signed_bytes() const {
  ByteWriter w = header(MessageKind::kModuleOutput);
  w.u32(module_id).u64(frame).str(value.label()).f64(confidence);
  return std::move(w).bytes();
}

bool ModuleOutput::verify(const Verifier& verifier) const {
  if (!(confidence >= 0.0 && confidence <= 1.0)) return false;
  return verifier.verify(sig, module_id, signed_bytes());
}

ModuleOutput make_output(const Signer& signer, Frame frame, DecisionValue value, double confidence) {
  ModuleOutput out{signer.id(), frame, std::move(value), confidence, AuthTag{}};
  out.sig = signer.sign(out.signed_bytes());
  return out;
}

std::vector<std::uint8_t> Announcement::signed_bytes() const {
  ByteWriter w = header(MessageKind::kAnnouncement);
  w.u32(module_id).u64(frame).fixed(value_digest.bytes);
  return std::move(w).bytes();
}

bool Announcement::verify(const Verifier& verifier) const {
  return verifier.verify(sig, module_id, signed_bytes());
}

Announcement make_announcement(const Signer& signer, Frame frame, const DecisionValue& value) {
  Announcement a{signer.id(), frame, bftguard::value_digest(value), AuthTag{}};
  a.sig = signer.sign(a.signed_bytes());
  return a;
}

std::vector<std::uint8_t> InputDispatch::canonical_bytes() const {
  ByteWriter w = header(MessageKind::kInput);
  w.u64(frame).u32(module_id).str(observation.label());
  return std::move(w).bytes();
}

bool EquivocationProof::verify(const Verifier& verifier) const {
  return first.module_id == second.module_id && first.frame == second.frame && first.verify(verifier) &&
         second.verify(verifier) && digest(first.signed_bytes()) != digest(second.signed_bytes());
}

std::optional<EquivocationProof> detect_equivocation(const ModuleOutput& a, const ModuleOutput& b,
                                                     const Verifier& verifier) {
  EquivocationProof proof{a, b};
  if (!proof.verify(verifier)) return std::nullopt;
  return proof;
}

std::vector<std::uint8_t> canonical_bytes(const PrePrepare& m) {
  ByteWriter w = header(MessageKind::kPrePrepare);
  w.u64(m.frame).u64(m.view).str(m.value.label()).fixed(m.digest.bytes);
  return std::move(w).bytes();
}

std::vector<std::uint8_t> canonical_bytes(const Prepare& m) {
  ByteWriter w = header(MessageKind::kPrepare);
  w.u64(m.frame).u64(m.view).str(m.value.label()).fixed(m.digest.bytes);
  put_tag(w, m.proposal_tag);
  return std::move(w).bytes();
}

std::vector<std::uint8_t> canonical_bytes(const Commit& m) {
  ByteWriter w = header(MessageKind::kCommit);
  w.u64(m.frame).u64(m.view).str(m.value.label()).fixed(m.digest.bytes);
  return std::move(w).bytes();
}

std::vector<std::uint8_t> canonical_bytes(const ViewChange& m) {
  ByteWriter w = header(MessageKind::kViewChange);
  w.u64(m.frame).u64(m.new_view).boolean(m.certificate.has_value());
  if (m.certificate) put_certificate(w, *m.certificate);
  return std::move(w).bytes();
}

std::vector<std::uint8_t> canonical_bytes(const NewView& m) {
  ByteWriter w = header(MessageKind::kNewView);
  w.u64(m.frame).u64(m.view).u32(static_cast<std::uint32_t>(m.view_changes.size()));
  for (const auto& vc : m.view_changes) put_signed(w, vc);
  put_signed(w, m.proposal);
  return std::move(w).bytes();
}

std::vector<std::uint8_t> canonical_bytes(const Reply& m) {
  ByteWriter w = header(MessageKind::kReply);
  w.u64(m.frame).u64(m.view).str(m.value.label()).fixed(m.digest.bytes);
  return std::move(w).bytes();
}

std::vector<std::uint8_t> canonical_bytes(const StateRequest& m) {
  ByteWriter w = header(MessageKind::kStateRequest);
  w.u32(m.requester).u64(m.frame);
  return std::move(w).bytes();
}

std::vector<std::uint8_t> canonical_bytes(const StateSnapshot& m) {
  ByteWriter w = header(MessageKind::kStateSnapshot);
  w.boolean(m.checkpoint.has_value());
  if (m.checkpoint) {
    w.u64(m.checkpoint->up_to_frame).fixed(m.checkpoint->log_digest.bytes);
    w.u32(static_cast<std::uint32_t>(m.checkpoint->votes.size()));
    for (const auto& v : m.checkpoint->votes) put_signed(w, v);
  }
  w.u32(static_cast<std::uint32_t>(m.log.size()));
  for (const auto& label : m.log) w.str(label);
  return std::move(w).bytes();
}

std::vector<std::uint8_t> canonical_bytes(const CheckpointAttest& m) {
  ByteWriter w = header(MessageKind::kCheckpointAttest);
  w.u64(m.up_to_frame).fixed(m.log_digest.bytes);
  return std::move(w).bytes();
}

std::vector<std::uint8_t> canonical_bytes(const ProtocolMessage& m) {
  return std::visit([](const auto& body) { return canonical_bytes(body); }, m);
}

MessageKind kind_of(const ProtocolMessage& m) noexcept {
  return static_cast<MessageKind>(m.index() + 1);
}

MessageKind SignedMessage::kind() const noexcept { return kind_of(message); }

Digest wire_digest(const SignedMessage& m) {
  ByteWriter w;
  w.blob(canonical_bytes(m.message));
  put_tag(w, m.tag);
  return digest(w.bytes());
}

SignedMessage sign_message(const Signer& signer, ProtocolMessage message) {
  AuthTag tag = signer.sign(canonical_bytes(message));
  return SignedMessage{std::move(message), tag};
}

bool verify_message(const SignedMessage& m, const Verifier& verifier) {
  return verifier.verify(m.tag, m.tag.signer, canonical_bytes(m.message));
}

Digest log_digest(const std::vector<std::string>& labels) {
  ByteWriter w;
  w.str("bftguard/log").u64(labels.size());
  for (const auto& l : labels) w.str(l);
  return digest(w.bytes());
}

}  // namespace bftguard
