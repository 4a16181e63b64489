// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "bftguard/consensus/participant.hpp"
#include "bftguard/harness/profile.hpp"
#include "bftguard/quorum/crypto.hpp"

namespace bftguard {

/// A participant that sends nothing: Silent modules and crashed replicas.
class MuteParticipant final : public Participant {
 public:
  explicit MuteParticipant(ModuleId id) : id_(id) {}
  ModuleId id() const noexcept override { return id_; }
  void start_frame(Frame, const std::optional<ModuleOutput>&, Round, Step&) override {}
  void on_message(const SignedMessage&, Round, Step&) override {}
  void on_tick(Round, Step&) override {}
  void begin_state_transfer(Frame, Round, Step&) override {}
  std::unique_ptr<Participant> clone() const override { return std::make_unique<MuteParticipant>(*this); }

 private:
  ModuleId id_;
};

/// Default equivocation split: the lower half (rounded down) of the other
/// modules sees label_a, the rest label_b.
std::vector<ModuleId> default_equivocation_side_a(ModuleId self, std::uint32_t n);

/// Replica protocol driven by a lying module. ByzantineFixed/Random push
/// their own label: they propose it when leading, endorse only proposals
/// carrying it, send the observer a matching Reply, and build NewViews that
/// ignore prepared certificates. ByzantineEquivocate does the same with
/// label_a towards side A and label_b towards everyone else.
class AdversaryReplica final : public Participant {
 public:
  AdversaryReplica(ModuleId id, QuorumConfig quorum, Signer signer, FaultProfile profile,
                   std::shared_ptr<const DecisionSpace> space, std::vector<ModuleId> side_a = {});

  ModuleId id() const noexcept override { return id_; }
  void start_frame(Frame frame, const std::optional<ModuleOutput>& own, Round now, Step& step) override;
  void on_message(const SignedMessage& message, Round now, Step& step) override;
  void on_tick(Round, Step&) override {}
  void begin_state_transfer(Frame, Round, Step&) override {}
  std::unique_ptr<Participant> clone() const override { return std::make_unique<AdversaryReplica>(*this); }

 private:
  struct Target {
    DecisionValue value;
    std::vector<NodeId> recipients;
  };

  void send(std::vector<NodeId> to, ProtocolMessage body, Step& step);
  const Target* target_for(const DecisionValue& value) const;
  void endorse(const Signed<PrePrepare>& pp, Step& step);
  void lead_view(ViewNumber view, std::vector<Signed<ViewChange>> vcs, Step& step);

  ModuleId id_;
  QuorumConfig quorum_;
  Signer signer_;
  FaultProfile profile_;
  std::shared_ptr<const DecisionSpace> space_;
  std::set<ModuleId> side_a_;

  std::optional<Frame> frame_;
  std::vector<Target> targets_;
  std::set<std::pair<ViewNumber, Digest>> endorsed_;
  std::set<ViewNumber> vc_sent_;
  std::set<ViewNumber> led_;
  std::map<ViewNumber, std::map<ModuleId, Signed<ViewChange>>> view_changes_;
};

}  // namespace bftguard
