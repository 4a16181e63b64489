// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include "bftguard/consensus/replica.hpp"

#include <algorithm>
#include <stdexcept>

#include "bftguard/quorum/codec.hpp"

namespace bftguard {
namespace {

constexpr std::size_t kFutureBufferLimit = 4096;

std::optional<Frame> frame_of(const ProtocolMessage& m) {
  return std::visit(
      [](const auto& body) -> std::optional<Frame> {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, StateRequest> || std::is_same_v<T, StateSnapshot> ||
                      std::is_same_v<T, CheckpointAttest>) {
          return std::nullopt;
        } else {
          return body.frame;
        }
      },
      m);
}

std::string describe(ModuleId signer, std::string_view what, Frame frame, ViewNumber view) {
  return "module " + std::to_string(signer) + ": " + std::string(what) + " (frame " + std::to_string(frame) +
         ", view " + std::to_string(view) + ")";
}

}  // namespace

ProposalCheck validate_proposal(const DecisionValue& own_output, const DecisionValue& proposed) noexcept {
  return own_output == proposed ? ProposalCheck::kAccept : ProposalCheck::kReject;
}

bool valid_certificate(const PrepareCertificate& cert, const QuorumConfig& q, const Verifier& verifier,
                       const DecisionSpace& space) {
  if (!space.contains(cert.value.label()) || cert.digest != value_digest(cert.value)) return false;
  const ModuleId leader = leader_of(cert.frame, cert.view, q.n());
  PrePrepare pp{cert.frame, cert.view, cert.value, cert.digest};
  if (cert.proposal_tag.signer != leader || !verifier.verify(cert.proposal_tag, leader, canonical_bytes(pp))) {
    return false;
  }
  std::set<ModuleId> signers;
  for (const auto& p : cert.prepares) {
    if (p.signer() >= q.n() || p.body.frame != cert.frame || p.body.view != cert.view ||
        p.body.digest != cert.digest || !(p.body.value == cert.value)) {
      return false;
    }
    if (!verify_signed(p, verifier)) return false;
    signers.insert(p.signer());
  }
  return signers.size() == cert.prepares.size() && signers.size() >= q.quorum();
}

void validate_snapshot(const StateSnapshot& snapshot, const QuorumConfig& q, const Verifier& verifier,
                       const DecisionSpace& space) {
  if (!snapshot.checkpoint) throw SnapshotRejected("snapshot carries no checkpoint");
  const Checkpoint& cp = *snapshot.checkpoint;
  std::set<ModuleId> signers;
  for (const auto& vote : cp.votes) {
    if (vote.signer() >= q.n() || vote.body.up_to_frame != cp.up_to_frame || vote.body.log_digest != cp.log_digest) {
      throw SnapshotRejected("checkpoint attestation does not match the checkpoint");
    }
    if (!verify_signed(vote, verifier)) throw SnapshotRejected("checkpoint attestation has a bad tag");
    if (!signers.insert(vote.signer()).second) throw SnapshotRejected("duplicate checkpoint attestation");
  }
  if (signers.size() < q.quorum()) {
    throw SnapshotRejected("checkpoint has " + std::to_string(signers.size()) + " attestations, needs " +
                           std::to_string(q.quorum()));
  }
  if (snapshot.log.size() < cp.up_to_frame + 1) throw SnapshotRejected("snapshot log shorter than checkpoint");
  std::vector<std::string> prefix(snapshot.log.begin(), snapshot.log.begin() + static_cast<long>(cp.up_to_frame + 1));
  for (const auto& label : prefix) {
    if (!space.contains(label)) throw SnapshotRejected("snapshot log holds unknown label '" + label + "'");
  }
  if (log_digest(prefix) != cp.log_digest) throw SnapshotRejected("snapshot log does not match attested digest");
}

Replica::Replica(ModuleId id, ConsensusConfig cfg, Signer signer, Verifier verifier,
                 std::shared_ptr<const DecisionSpace> space)
    : id_(id), cfg_(std::move(cfg)), signer_(std::move(signer)), verifier_(std::move(verifier)),
      space_(std::move(space)) {
  if (id_ >= cfg_.quorum.n()) throw std::invalid_argument("replica id outside [0, n)");
  if (signer_.id() != id_) throw std::invalid_argument("signer bound to a different module");
  if (!space_) throw std::invalid_argument("replica needs a decision space");
  if (cfg_.timeout_rounds == 0) throw std::invalid_argument("timeout_rounds must be positive");
  if (cfg_.checkpoint_interval == 0) throw std::invalid_argument("checkpoint_interval must be positive");
}

std::vector<NodeId> Replica::peers() const {
  std::vector<NodeId> out;
  for (ModuleId m = 0; m < cfg_.quorum.n(); ++m) {
    if (m != id_) out.push_back(m);
  }
  return out;
}

void Replica::send(std::vector<NodeId> to, ProtocolMessage body, Round now, Step& step, bool retransmit) {
  Outbound ob{std::move(to), sign_message(signer_, std::move(body))};
  if (retransmit && inst_) {
    inst_->resend.push_back(ob);
    inst_->last_send = now;
  }
  step.out.push_back(std::move(ob));
}

void Replica::resend_all(Round now, Step& step) {
  for (const auto& ob : inst_->resend) step.out.push_back(ob);
  inst_->last_send = now;
}

// ---------------------------------------------------------------------------
// Frame lifecycle

void Replica::start_frame(Frame frame, const std::optional<ModuleOutput>& own, Round now, Step& step) {
  if (inst_ && frame <= inst_->frame) throw std::logic_error("frames must be started in increasing order");
  if (own && (own->module_id != id_ || own->frame != frame)) {
    throw std::invalid_argument("own output belongs to another module or frame");
  }
  inst_.emplace();
  inst_->frame = frame;
  inst_->own = own;
  inst_->timer_start = now;
  inst_->last_send = now;

  if (own && leader_of(frame, 0, cfg_.quorum.n()) == id_) propose(*own, now, step);

  std::vector<SignedMessage> buffered;
  buffered.swap(future_);
  for (auto& m : buffered) {
    auto f = frame_of(m.message);
    if (*f == frame) {
      on_message(m, now, step);
    } else if (*f > frame) {
      future_.push_back(std::move(m));
    }
  }
}

void Replica::propose(const ModuleOutput& own, Round now, Step& step) {
  if (!inst_) {
    violation(describe(id_, "propose outside a frame", 0, 0));
    return;
  }
  Instance& in = *inst_;
  if (leader_of(in.frame, in.view, cfg_.quorum.n()) != id_) {
    violation(describe(id_, "propose by non-leader", in.frame, in.view));
    return;
  }
  if (in.view != 0 || in.phase != Phase::kIdle || in.leader_proposals.count(in.view) != 0) {
    violation(describe(id_, "second proposal in one view", in.frame, in.view));
    return;
  }
  if (own.frame != in.frame || !space_->contains(own.value.label())) {
    violation(describe(id_, "proposal for a foreign frame", in.frame, in.view));
    return;
  }
  PrePrepare body{in.frame, in.view, own.value, value_digest(own.value)};
  auto pp = sign_body(signer_, body);
  in.leader_proposals[in.view].emplace(pp.body.digest, pp);
  send(peers(), body, now, step);
  accept_proposal(pp, false, now, step);
}

// ---------------------------------------------------------------------------
// Dispatch

void Replica::on_message(const SignedMessage& message, Round now, Step& step) {
  const ModuleId signer = message.signer();
  if (signer >= cfg_.quorum.n() || signer == id_) return;

  auto frame = frame_of(message.message);
  if (frame) {
    if (!inst_ || *frame > inst_->frame) {
      if (future_.size() < kFutureBufferLimit && !transfer_) future_.push_back(message);
      return;
    }
    if (*frame < inst_->frame) return;  // stale frame
  }
  if (!verify_message(message, verifier_)) {
    violation(describe(signer, "bad message tag", frame.value_or(0), 0));
    return;
  }
  std::visit([&](const auto& body) { handle(body, message, now, step); }, message.message);
}

void Replica::on_tick(Round now, Step& step) {
  if (transfer_) {
    if (now - transfer_->last_request >= cfg_.timeout_rounds) {
      transfer_->last_request = now;
      send(peers(), StateRequest{id_, transfer_->requested_at}, now, step, false);
    }
    return;
  }
  if (!inst_) return;
  Instance& in = *inst_;
  if (!in.decided && in.timer_start && now - *in.timer_start >= cfg_.timeout_rounds) {
    trigger_view_change(ViewChangeReason::kTimeout, now, step);
    return;
  }
  if (cfg_.retransmit_interval > 0 && now - in.last_send >= cfg_.retransmit_interval) resend_all(now, step);
}

// ---------------------------------------------------------------------------
// Normal case

bool Replica::proposal_tag_valid(Frame frame, ViewNumber view, const DecisionValue& value, const Digest& d,
                                 const AuthTag& tag) const {
  const ModuleId leader = leader_of(frame, view, cfg_.quorum.n());
  if (tag.signer != leader) return false;
  return verifier_.verify(tag, leader, canonical_bytes(PrePrepare{frame, view, value, d}));
}

void Replica::note_leader_proposal(Signed<PrePrepare> pp, Round now, Step& step) {
  Instance& in = *inst_;
  auto& seen = in.leader_proposals[pp.body.view];
  if (seen.count(pp.body.digest) != 0) return;
  if (!seen.empty()) {
    const auto& first = seen.begin()->second;
    const ViewNumber v = pp.body.view;
    equivocations_.push_back(LeaderEquivocation{in.frame, v, pp.signer(), first, pp});
    in.equivocating_views.insert(v);
    violation(describe(pp.signer(), "leader equivocation", in.frame, v));
    seen.emplace(pp.body.digest, std::move(pp));
    if (cfg_.equivocation_fast_path && v == in.view && !in.awaiting_new_view && !in.decided) {
      trigger_view_change(ViewChangeReason::kEquivocation, now, step);
    }
    return;
  }
  const ViewNumber v = pp.body.view;
  seen.emplace(pp.body.digest, pp);
  // View 0 proposals need no further proof; later views arrive via NewView.
  if (v == 0 && v == in.view && !in.awaiting_new_view && !in.proposal) accept_proposal(pp, false, now, step);
}

void Replica::accept_proposal(const Signed<PrePrepare>& pp, bool certified, Round now, Step& step) {
  Instance& in = *inst_;
  in.proposal = Proposal{pp.body.value, pp.body.digest, pp.tag, false};
  if (in.phase == Phase::kIdle) in.phase = Phase::kPrePrepared;
  const bool endorse = certified || (in.own && validate_proposal(in.own->value, pp.body.value) == ProposalCheck::kAccept);
  if (endorse) {
    in.proposal->endorsed = true;
    Prepare body{in.frame, in.view, pp.body.value, pp.body.digest, pp.tag};
    auto own_vote = sign_body(signer_, body);
    in.prepares[in.view][body.digest].emplace(id_, own_vote);
    in.prepare_by_signer[in.view].emplace(id_, body.digest);
    send(peers(), body, now, step);
  }
  check_prepared(now, step);
  check_committed(now, step);
}

void Replica::handle(const PrePrepare& m, const SignedMessage& raw, Round now, Step& step) {
  if (!inst_ || m.view < inst_->view) return;
  if (raw.signer() != leader_of(m.frame, m.view, cfg_.quorum.n())) {
    violation(describe(raw.signer(), "pre-prepare from non-leader", m.frame, m.view));
    return;
  }
  if (m.view != 0) {
    violation(describe(raw.signer(), "bare pre-prepare outside view 0", m.frame, m.view));
    return;
  }
  if (!space_->contains(m.value.label()) || m.digest != value_digest(m.value)) {
    violation(describe(raw.signer(), "malformed pre-prepare", m.frame, m.view));
    return;
  }
  note_leader_proposal(Signed<PrePrepare>{m, raw.tag}, now, step);
}

void Replica::handle(const Prepare& m, const SignedMessage& raw, Round now, Step& step) {
  if (!inst_ || m.view < inst_->view) return;
  if (!space_->contains(m.value.label()) || m.digest != value_digest(m.value) ||
      !proposal_tag_valid(m.frame, m.view, m.value, m.digest, m.proposal_tag)) {
    violation(describe(raw.signer(), "prepare without a valid leader proposal", m.frame, m.view));
    return;
  }
  Instance& in = *inst_;
  note_leader_proposal(Signed<PrePrepare>{PrePrepare{m.frame, m.view, m.value, m.digest}, m.proposal_tag}, now, step);

  auto& by_signer = in.prepare_by_signer[m.view];
  auto [it, fresh] = by_signer.emplace(raw.signer(), m.digest);
  if (!fresh) {
    if (it->second != m.digest) {
      conflicts_.push_back(VoteConflict{m.frame, m.view, raw.signer(), MessageKind::kPrepare});
      violation(describe(raw.signer(), "conflicting prepares", m.frame, m.view));
    }
    return;
  }
  in.prepares[m.view][m.digest].emplace(raw.signer(), Signed<Prepare>{m, raw.tag});
  check_prepared(now, step);
  check_committed(now, step);
}

void Replica::handle(const Commit& m, const SignedMessage& raw, Round now, Step& step) {
  if (!inst_ || m.view < inst_->view) return;
  if (!space_->contains(m.value.label()) || m.digest != value_digest(m.value)) {
    violation(describe(raw.signer(), "malformed commit", m.frame, m.view));
    return;
  }
  Instance& in = *inst_;
  auto [it, fresh] = in.commit_by_signer[m.view].emplace(raw.signer(), m.digest);
  if (!fresh) {
    if (it->second != m.digest) {
      conflicts_.push_back(VoteConflict{m.frame, m.view, raw.signer(), MessageKind::kCommit});
      violation(describe(raw.signer(), "conflicting commits", m.frame, m.view));
    }
    return;
  }
  in.commits[m.view][m.digest].insert(raw.signer());
  if (!in.commit_values.count(m.digest)) in.commit_values.emplace(m.digest, m.value);
  check_committed(now, step);
}

void Replica::check_prepared(Round now, Step& step) {
  Instance& in = *inst_;
  if (in.awaiting_new_view || !in.proposal || in.phase != Phase::kPrePrepared) return;
  auto vit = in.prepares.find(in.view);
  if (vit == in.prepares.end()) return;
  auto dit = vit->second.find(in.proposal->digest);
  if (dit == vit->second.end() || dit->second.size() < cfg_.quorum.quorum()) return;

  in.phase = Phase::kPrepared;
  PrepareCertificate cert{in.frame, in.view, in.proposal->value, in.proposal->digest, in.proposal->leader_tag, {}};
  VoteRecord rec{in.frame, in.view, MessageKind::kPrepare, in.proposal->digest, {}};
  for (const auto& [signer, vote] : dit->second) {
    cert.prepares.push_back(vote);
    rec.signers.push_back(signer);
  }
  cert_ = std::move(cert);
  vote_log_.push_back(std::move(rec));

  Commit body{in.frame, in.view, in.proposal->value, in.proposal->digest};
  in.commits[in.view][body.digest].insert(id_);
  in.commit_by_signer[in.view].emplace(id_, body.digest);
  in.commit_values.emplace(body.digest, body.value);
  send(peers(), body, now, step);
}

void Replica::check_committed(Round now, Step& step) {
  Instance& in = *inst_;
  if (in.awaiting_new_view) return;
  auto vit = in.commits.find(in.view);
  if (vit == in.commits.end()) return;
  for (const auto& [d, signers] : vit->second) {
    if (signers.size() < cfg_.quorum.quorum()) continue;
    if (in.phase == Phase::kCommitted) return;
    const DecisionValue value = in.commit_values.at(d);
    vote_log_.push_back(VoteRecord{in.frame, in.view, MessageKind::kCommit, d,
                                   std::vector<ModuleId>(signers.begin(), signers.end())});
    decide(value, in.view, now, step);
    return;
  }
}

void Replica::decide(const DecisionValue& value, ViewNumber view, Round now, Step& step) {
  Instance& in = *inst_;
  in.phase = Phase::kCommitted;
  if (in.decided) {
    if (!(*in.decided == value)) violation(describe(id_, "re-commit with a different value", in.frame, view));
    return;
  }
  in.decided = value;
  log_.insert_or_assign(in.frame, value);
  step.committed = CommitEvent{in.frame, view, value, now};
  send({kObserverNode}, Reply{in.frame, view, value, value_digest(value)}, now, step);
  maybe_checkpoint(in.frame, now, step);
}

// ---------------------------------------------------------------------------
// View change

void Replica::trigger_view_change(ViewChangeReason reason, Round now, Step& step) {
  if (!inst_) return;
  if (inst_->decided && reason != ViewChangeReason::kJoin) return;
  move_to_view(inst_->view + 1, now, step);
}

void Replica::move_to_view(ViewNumber target, Round now, Step& step) {
  Instance& in = *inst_;
  if (target <= in.view) return;
  in.view = target;
  in.awaiting_new_view = true;
  in.new_view_sent = false;
  in.timer_start.reset();
  in.proposal.reset();
  in.phase = Phase::kIdle;
  in.resend.clear();
  std::optional<PrepareCertificate> carried;
  if (cert_ && cert_->frame == in.frame) carried = cert_;
  ViewChange body{in.frame, target, carried};
  in.view_changes[target].emplace(id_, sign_body(signer_, body));
  ++view_changes_sent_;
  send(peers(), body, now, step);
  check_view_change_quorum(now, step);
}

void Replica::handle(const ViewChange& m, const SignedMessage& raw, Round now, Step& step) {
  if (!inst_ || m.new_view < inst_->view || m.new_view == 0) return;
  if (m.certificate) {
    const auto& c = *m.certificate;
    if (c.frame != m.frame || c.view >= m.new_view || !valid_certificate(c, cfg_.quorum, verifier_, *space_)) {
      violation(describe(raw.signer(), "view change with an invalid certificate", m.frame, m.new_view));
      return;
    }
  }
  inst_->view_changes[m.new_view].emplace(raw.signer(), Signed<ViewChange>{m, raw.tag});
  check_join(now, step);
  check_view_change_quorum(now, step);
}

void Replica::check_join(Round now, Step& step) {
  Instance& in = *inst_;
  std::map<ModuleId, ViewNumber> highest;
  for (const auto& [v, vcs] : in.view_changes) {
    if (v <= in.view) continue;
    for (const auto& [signer, vc] : vcs) {
      if (signer == id_) continue;
      auto& h = highest[signer];
      h = std::max(h, v);
    }
  }
  if (highest.size() < cfg_.quorum.reply_match()) return;
  ViewNumber target = highest.begin()->second;
  for (const auto& [signer, v] : highest) target = std::min(target, v);
  move_to_view(target, now, step);
}

void Replica::check_view_change_quorum(Round now, Step& step) {
  Instance& in = *inst_;
  if (!in.awaiting_new_view) return;
  auto it = in.view_changes.find(in.view);
  if (it == in.view_changes.end() || it->second.size() < cfg_.quorum.quorum()) return;
  if (!in.timer_start) in.timer_start = now;
  if (leader_of(in.frame, in.view, cfg_.quorum.n()) == id_ && !in.new_view_sent) form_new_view(now, step);
}

std::optional<PrepareCertificate> Replica::highest_certificate(const std::vector<Signed<ViewChange>>& vcs) const {
  std::optional<PrepareCertificate> best;
  for (const auto& vc : vcs) {
    const auto& c = vc.body.certificate;
    if (c && (!best || c->view > best->view)) best = c;
  }
  return best;
}

void Replica::form_new_view(Round now, Step& step) {
  Instance& in = *inst_;
  const auto& pool = in.view_changes.at(in.view);
  std::vector<Signed<ViewChange>> vcs;
  for (const auto& [signer, vc] : pool) {
    vcs.push_back(vc);
    if (vcs.size() == cfg_.quorum.quorum()) break;
  }
  auto cert = highest_certificate(vcs);
  std::optional<DecisionValue> value;
  if (cert) {
    value = cert->value;
  } else if (in.own) {
    value = in.own->value;
  }
  if (!value) return;  // nothing to propose; the view will time out
  PrePrepare body{in.frame, in.view, *value, value_digest(*value)};
  auto pp = sign_body(signer_, body);
  in.new_view_sent = true;
  in.awaiting_new_view = false;
  in.leader_proposals[in.view].emplace(pp.body.digest, pp);
  send(peers(), NewView{in.frame, in.view, std::move(vcs), pp}, now, step);
  accept_proposal(pp, cert.has_value(), now, step);
}

void Replica::handle(const NewView& m, const SignedMessage& raw, Round now, Step& step) {
  if (!inst_ || m.view < inst_->view || m.view == 0) return;
  Instance& in = *inst_;
  if (m.view == in.view && !in.awaiting_new_view) return;
  const ModuleId leader = leader_of(m.frame, m.view, cfg_.quorum.n());
  const auto& pp = m.proposal;
  const bool well_formed = raw.signer() == leader && pp.signer() == leader && pp.body.frame == m.frame &&
                           pp.body.view == m.view && space_->contains(pp.body.value.label()) &&
                           pp.body.digest == value_digest(pp.body.value) && verify_signed(pp, verifier_);
  if (!well_formed) {
    violation(describe(raw.signer(), "malformed new-view", m.frame, m.view));
    return;
  }
  std::set<ModuleId> signers;
  for (const auto& vc : m.view_changes) {
    const auto& c = vc.body.certificate;
    const bool ok = vc.signer() < cfg_.quorum.n() && vc.body.frame == m.frame && vc.body.new_view == m.view &&
                    verify_signed(vc, verifier_) &&
                    (!c || (c->frame == m.frame && c->view < m.view &&
                            valid_certificate(*c, cfg_.quorum, verifier_, *space_)));
    if (!ok || !signers.insert(vc.signer()).second) {
      violation(describe(raw.signer(), "new-view with an invalid view-change set", m.frame, m.view));
      return;
    }
  }
  if (signers.size() < cfg_.quorum.quorum()) {
    violation(describe(raw.signer(), "new-view without a view-change quorum", m.frame, m.view));
    return;
  }
  auto cert = highest_certificate(m.view_changes);
  if (cert) {
    for (const auto& vc : m.view_changes) {
      const auto& c = vc.body.certificate;
      if (c && c->view == cert->view && c->digest != cert->digest) {
        violation(describe(raw.signer(), "new-view with conflicting certificates", m.frame, m.view));
        return;
      }
    }
    if (cert->digest != pp.body.digest) {
      violation(describe(raw.signer(), "new-view ignores the highest certificate", m.frame, m.view));
      return;
    }
  }

  if (m.view > in.view) {
    in.view = m.view;
    in.proposal.reset();
    in.phase = Phase::kIdle;
    in.resend.clear();
  }
  in.awaiting_new_view = false;
  if (!in.timer_start) in.timer_start = now;
  in.leader_proposals[m.view].emplace(pp.body.digest, pp);
  accept_proposal(pp, cert.has_value(), now, step);
}

void Replica::handle(const Reply&, const SignedMessage&, Round, Step&) {}

// ---------------------------------------------------------------------------
// Checkpoints and state transfer

void Replica::maybe_checkpoint(Frame committed_frame, Round now, Step& step) {
  if ((committed_frame + 1) % cfg_.checkpoint_interval != 0) return;
  std::vector<std::string> labels;
  for (Frame f = 0; f <= committed_frame; ++f) {
    auto it = log_.find(f);
    if (it == log_.end()) return;  // gap: nothing to attest
    labels.push_back(it->second.label());
  }
  CheckpointAttest body{committed_frame, log_digest(labels)};
  auto own = sign_body(signer_, body);
  attests_[committed_frame][body.log_digest].emplace(id_, own);
  send(peers(), body, now, step, false);
  handle(body, SignedMessage{body, own.tag}, now, step);
}

void Replica::handle(const CheckpointAttest& m, const SignedMessage& raw, Round, Step&) {
  auto& votes = attests_[m.up_to_frame][m.log_digest];
  votes.emplace(raw.signer(), Signed<CheckpointAttest>{m, raw.tag});
  if (votes.size() < cfg_.quorum.quorum()) return;
  if (stable_ && stable_->up_to_frame >= m.up_to_frame) return;
  std::vector<std::string> labels;
  for (Frame f = 0; f <= m.up_to_frame; ++f) {
    auto it = log_.find(f);
    if (it == log_.end()) return;
    labels.push_back(it->second.label());
  }
  if (log_digest(labels) != m.log_digest) return;
  Checkpoint cp{m.up_to_frame, m.log_digest, {}};
  for (const auto& [signer, vote] : votes) cp.votes.push_back(vote);
  stable_ = std::move(cp);
  // Older attestations are no longer useful.
  attests_.erase(attests_.begin(), attests_.lower_bound(m.up_to_frame));
}

void Replica::handle(const StateRequest& m, const SignedMessage& raw, Round now, Step& step) {
  if (transfer_ || m.requester != raw.signer()) return;
  StateSnapshot snap{stable_, {}};
  if (stable_) {
    for (Frame f = 0; f <= stable_->up_to_frame; ++f) snap.log.push_back(log_.at(f).label());
  }
  send({raw.signer()}, std::move(snap), now, step, false);
}

void Replica::handle(const StateSnapshot& m, const SignedMessage& raw, Round, Step& step) {
  if (!transfer_) return;
  if (!m.checkpoint) {
    transfer_->genesis_votes.insert(raw.signer());
    if (transfer_->genesis_votes.size() >= cfg_.quorum.reply_match()) {
      transfer_.reset();
      resume_after_.reset();
      step.state_transferred = std::optional<Frame>{};
    }
    return;
  }
  try {
    step.state_transferred = apply_snapshot(m);
  } catch (const SnapshotRejected& e) {
    violation(describe(raw.signer(), std::string("rejected snapshot: ") + e.what(), 0, 0));
  }
}

void Replica::begin_state_transfer(Frame current_frame, Round now, Step& step) {
  transfer_ = Transfer{current_frame, {}, now};
  future_.clear();
  send(peers(), StateRequest{id_, current_frame}, now, step, false);
}

std::optional<Frame> Replica::apply_snapshot(const StateSnapshot& snapshot) {
  validate_snapshot(snapshot, cfg_.quorum, verifier_, *space_);
  const Checkpoint& cp = *snapshot.checkpoint;
  for (Frame f = 0; f <= cp.up_to_frame; ++f) log_.insert_or_assign(f, space_->value(snapshot.log[f]));
  if (!stable_ || stable_->up_to_frame < cp.up_to_frame) stable_ = cp;
  resume_after_ = cp.up_to_frame;
  transfer_.reset();
  return cp.up_to_frame;
}

// ---------------------------------------------------------------------------
// Inspection

std::optional<Frame> Replica::frame() const noexcept {
  if (!inst_) return std::nullopt;
  return inst_->frame;
}

ViewNumber Replica::view() const noexcept { return inst_ ? inst_->view : 0; }
Phase Replica::phase() const noexcept { return inst_ ? inst_->phase : Phase::kIdle; }
bool Replica::awaiting_new_view() const noexcept { return inst_ && inst_->awaiting_new_view; }

std::optional<DecisionValue> Replica::decided() const {
  if (!inst_) return std::nullopt;
  return inst_->decided;
}

const std::optional<PrepareCertificate>& Replica::certificate() const noexcept { return cert_; }

std::optional<Frame> Replica::last_committed_frame() const noexcept {
  if (log_.empty()) return std::nullopt;
  return log_.rbegin()->first;
}

Digest Replica::fingerprint() const {
  ByteWriter w;
  w.u32(id_).boolean(inst_.has_value());
  if (inst_) {
    const Instance& in = *inst_;
    w.u64(in.frame).u64(in.view).u8(static_cast<std::uint8_t>(in.phase)).boolean(in.awaiting_new_view);
    w.boolean(in.new_view_sent).boolean(in.proposal.has_value());
    if (in.proposal) w.fixed(in.proposal->digest.bytes).boolean(in.proposal->endorsed);
    w.boolean(in.decided.has_value());
    if (in.decided) w.str(in.decided->label());
    w.boolean(in.timer_start.has_value()).u64(in.timer_start.value_or(0));
    for (ViewNumber v : in.equivocating_views) w.u64(v);
    w.u8(0xFF);
    for (const auto& [v, by_digest] : in.prepares) {
      for (const auto& [d, votes] : by_digest) {
        w.u64(v).fixed(d.bytes);
        for (const auto& [signer, vote] : votes) w.u32(signer);
      }
    }
    w.u8(0xFE);
    for (const auto& [v, by_digest] : in.commits) {
      for (const auto& [d, signers] : by_digest) {
        w.u64(v).fixed(d.bytes);
        for (ModuleId s : signers) w.u32(s);
      }
    }
    w.u8(0xFD);
    for (const auto& [v, vcs] : in.view_changes) {
      w.u64(v);
      for (const auto& [signer, vc] : vcs) w.u32(signer);
    }
    w.u8(0xFC);
    for (const auto& [v, props] : in.leader_proposals) {
      w.u64(v);
      for (const auto& [d, pp] : props) w.fixed(d.bytes);
    }
  }
  w.boolean(cert_.has_value());
  if (cert_) w.u64(cert_->frame).u64(cert_->view).fixed(cert_->digest.bytes);
  for (const auto& [f, v] : log_) w.u64(f).str(v.label());
  return digest(w.bytes());
}

}  // namespace bftguard
