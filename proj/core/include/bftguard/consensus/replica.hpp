// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <stdexcept>
#include <vector>

#include "bftguard/consensus/participant.hpp"
#include "bftguard/quorum/crypto.hpp"
#include "bftguard/quorum/decision.hpp"
#include "bftguard/quorum/messages.hpp"
#include "bftguard/quorum/quorum.hpp"

namespace bftguard {

struct ConsensusConfig {
  QuorumConfig quorum;
  std::uint32_t timeout_rounds = 10;
  std::uint32_t checkpoint_interval = 5;
  /// Leader equivocation evidence triggers an immediate view change.
  bool equivocation_fast_path = true;
  /// Rebroadcast the current view's messages every this many rounds; 0 off.
  std::uint32_t retransmit_interval = 0;
};

enum class Phase { kIdle, kPrePrepared, kPrepared, kCommitted };

enum class ProposalCheck { kAccept, kReject };

/// Exact-match validation of a leader proposal against the replica's own
/// output.
ProposalCheck validate_proposal(const DecisionValue& own_output, const DecisionValue& proposed) noexcept;

enum class ViewChangeReason { kTimeout, kEquivocation, kJoin };

/// Two leader-signed proposals for the same (frame, view) with different
/// digests.
struct LeaderEquivocation {
  Frame frame = 0;
  ViewNumber view = 0;
  ModuleId leader = 0;
  Signed<PrePrepare> first;
  Signed<PrePrepare> second;
};

/// A signer sent two different votes of one kind in one (frame, view).
struct VoteConflict {
  Frame frame = 0;
  ViewNumber view = 0;
  ModuleId signer = 0;
  MessageKind kind = MessageKind::kPrepare;
};

/// Which signers' votes a replica counted when it crossed a threshold.
struct VoteRecord {
  Frame frame = 0;
  ViewNumber view = 0;
  MessageKind kind = MessageKind::kPrepare;
  Digest digest;
  std::vector<ModuleId> signers;
};

bool valid_certificate(const PrepareCertificate& cert, const QuorumConfig& q, const Verifier& verifier,
                       const DecisionSpace& space);

/// Throws SnapshotRejected when the snapshot lacks a valid 2f+1 checkpoint
/// proof or its log does not hash to the attested digest.
class SnapshotRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void validate_snapshot(const StateSnapshot& snapshot, const QuorumConfig& q, const Verifier& verifier,
                       const DecisionSpace& space);

/// PBFT replica state machine for one module.
class Replica final : public Participant {
 public:
  Replica(ModuleId id, ConsensusConfig cfg, Signer signer, Verifier verifier,
          std::shared_ptr<const DecisionSpace> space);

  ModuleId id() const noexcept override { return id_; }

  void start_frame(Frame frame, const std::optional<ModuleOutput>& own, Round now, Step& step) override;
  void on_message(const SignedMessage& message, Round now, Step& step) override;
  void on_tick(Round now, Step& step) override;
  void begin_state_transfer(Frame current_frame, Round now, Step& step) override;
  std::unique_ptr<Participant> clone() const override { return std::make_unique<Replica>(*this); }

  /// Leader entry point. A non-leader call, or a second proposal in the
  /// same view, is recorded as a protocol violation and sends nothing.
  void propose(const ModuleOutput& own, Round now, Step& step);

  /// Leaves the current view (instance must be undecided).
  void trigger_view_change(ViewChangeReason reason, Round now, Step& step);

  /// Adopts the attested log prefix. Returns the frame the replica resumes
  /// after (absent for a genesis snapshot). Throws SnapshotRejected.
  std::optional<Frame> apply_snapshot(const StateSnapshot& snapshot);

  // Inspection.
  std::optional<Frame> frame() const noexcept;
  ViewNumber view() const noexcept;
  Phase phase() const noexcept;
  bool awaiting_new_view() const noexcept;
  std::optional<DecisionValue> decided() const;
  const std::optional<PrepareCertificate>& certificate() const noexcept;
  const std::map<Frame, DecisionValue>& log() const noexcept { return log_; }
  const std::optional<Checkpoint>& stable_checkpoint() const noexcept { return stable_; }
  const std::vector<LeaderEquivocation>& leader_equivocations() const noexcept { return equivocations_; }
  const std::vector<VoteConflict>& vote_conflicts() const noexcept { return conflicts_; }
  const std::vector<VoteRecord>& vote_log() const noexcept { return vote_log_; }
  const std::vector<std::string>& violations() const noexcept { return violations_; }
  std::uint64_t view_changes_sent() const noexcept { return view_changes_sent_; }
  std::optional<Frame> last_committed_frame() const noexcept;
  bool transferring_state() const noexcept { return transfer_.has_value(); }
  /// Digest of the protocol-relevant state, for schedule exploration.
  Digest fingerprint() const;

 private:
  struct Proposal {
    DecisionValue value;
    Digest digest;
    AuthTag leader_tag;
    bool endorsed = false;
  };

  struct Instance {
    Frame frame = 0;
    ViewNumber view = 0;
    Phase phase = Phase::kIdle;
    std::optional<ModuleOutput> own;
    bool awaiting_new_view = false;
    bool new_view_sent = false;
    std::optional<Round> timer_start;
    std::optional<Proposal> proposal;
    std::map<ViewNumber, std::map<Digest, Signed<PrePrepare>>> leader_proposals;
    std::map<ViewNumber, std::map<Digest, std::map<ModuleId, Signed<Prepare>>>> prepares;
    std::map<ViewNumber, std::map<ModuleId, Digest>> prepare_by_signer;
    std::map<ViewNumber, std::map<Digest, std::set<ModuleId>>> commits;
    std::map<Digest, DecisionValue> commit_values;
    std::map<ViewNumber, std::map<ModuleId, Digest>> commit_by_signer;
    std::map<ViewNumber, std::map<ModuleId, Signed<ViewChange>>> view_changes;
    std::set<ViewNumber> equivocating_views;
    std::optional<DecisionValue> decided;
    std::vector<Outbound> resend;
    Round last_send = 0;
  };

  struct Transfer {
    Frame requested_at = 0;
    std::set<ModuleId> genesis_votes;
    Round last_request = 0;
  };

  std::vector<NodeId> peers() const;
  void send(std::vector<NodeId> to, ProtocolMessage body, Round now, Step& step, bool retransmit = true);
  void violation(std::string what) { violations_.push_back(std::move(what)); }
  void decide(const DecisionValue& value, ViewNumber view, Round now, Step& step);
  void resend_all(Round now, Step& step);

  void handle(const PrePrepare& m, const SignedMessage& raw, Round now, Step& step);
  void handle(const Prepare& m, const SignedMessage& raw, Round now, Step& step);
  void handle(const Commit& m, const SignedMessage& raw, Round now, Step& step);
  void handle(const ViewChange& m, const SignedMessage& raw, Round now, Step& step);
  void handle(const NewView& m, const SignedMessage& raw, Round now, Step& step);
  void handle(const Reply& m, const SignedMessage& raw, Round now, Step& step);
  void handle(const StateRequest& m, const SignedMessage& raw, Round now, Step& step);
  void handle(const StateSnapshot& m, const SignedMessage& raw, Round now, Step& step);
  void handle(const CheckpointAttest& m, const SignedMessage& raw, Round now, Step& step);

  bool proposal_tag_valid(Frame frame, ViewNumber view, const DecisionValue& value, const Digest& d,
                          const AuthTag& tag) const;
  void note_leader_proposal(Signed<PrePrepare> pp, Round now, Step& step);
  void accept_proposal(const Signed<PrePrepare>& pp, bool certified, Round now, Step& step);
  void check_prepared(Round now, Step& step);
  void check_committed(Round now, Step& step);
  void check_view_change_quorum(Round now, Step& step);
  void check_join(Round now, Step& step);
  void move_to_view(ViewNumber target, Round now, Step& step);
  void form_new_view(Round now, Step& step);
  void maybe_checkpoint(Frame committed_frame, Round now, Step& step);
  std::optional<PrepareCertificate> highest_certificate(const std::vector<Signed<ViewChange>>& vcs) const;

  ModuleId id_;
  ConsensusConfig cfg_;
  Signer signer_;
  Verifier verifier_;
  std::shared_ptr<const DecisionSpace> space_;

  std::optional<Instance> inst_;
  std::optional<PrepareCertificate> cert_;
  std::map<Frame, DecisionValue> log_;
  std::optional<Frame> resume_after_;
  std::map<Frame, std::map<Digest, std::map<ModuleId, Signed<CheckpointAttest>>>> attests_;
  std::optional<Checkpoint> stable_;
  std::optional<Transfer> transfer_;
  std::vector<SignedMessage> future_;

  std::vector<LeaderEquivocation> equivocations_;
  std::vector<VoteConflict> conflicts_;
  std::vector<VoteRecord> vote_log_;
  std::vector<std::string> violations_;
  std::uint64_t view_changes_sent_ = 0;
};

}  // namespace bftguard
