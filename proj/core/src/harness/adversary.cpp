// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include "bftguard/harness/adversary.hpp"

#include <stdexcept>

namespace bftguard {

std::vector<ModuleId> default_equivocation_side_a(ModuleId self, std::uint32_t n) {
  std::vector<ModuleId> others;
  for (ModuleId m = 0; m < n; ++m) {
    if (m != self) others.push_back(m);
  }
  others.resize(others.size() / 2);
  return others;
}

AdversaryReplica::AdversaryReplica(ModuleId id, QuorumConfig quorum, Signer signer, FaultProfile profile,
                                   std::shared_ptr<const DecisionSpace> space, std::vector<ModuleId> side_a)
    : id_(id), quorum_(quorum), signer_(std::move(signer)), profile_(std::move(profile)), space_(std::move(space)) {
  if (!is_byzantine(profile_)) throw std::invalid_argument("adversary replica needs a byzantine profile");
  if (std::holds_alternative<ByzantineEquivocate>(profile_)) {
    if (side_a.empty()) side_a = default_equivocation_side_a(id_, quorum_.n());
    side_a_.insert(side_a.begin(), side_a.end());
  }
}

void AdversaryReplica::send(std::vector<NodeId> to, ProtocolMessage body, Step& step) {
  if (to.empty()) return;
  step.out.push_back(Outbound{std::move(to), sign_message(signer_, std::move(body))});
}

const AdversaryReplica::Target* AdversaryReplica::target_for(const DecisionValue& value) const {
  for (const auto& t : targets_) {
    if (t.value == value) return &t;
  }
  return nullptr;
}

void AdversaryReplica::start_frame(Frame frame, const std::optional<ModuleOutput>& own, Round, Step& step) {
  frame_ = frame;
  targets_.clear();
  endorsed_.clear();
  vc_sent_.clear();
  led_.clear();
  view_changes_.clear();

  std::vector<NodeId> everyone, side_a, side_b;
  for (ModuleId m = 0; m < quorum_.n(); ++m) {
    if (m == id_) continue;
    everyone.push_back(m);
    (side_a_.count(m) ? side_a : side_b).push_back(m);
  }
  if (const auto* eq = std::get_if<ByzantineEquivocate>(&profile_)) {
    targets_.push_back(Target{space_->value(eq->label_a), side_a});
    targets_.push_back(Target{space_->value(eq->label_b), side_b});
  } else if (own) {
    targets_.push_back(Target{own->value, everyone});
  } else {
    return;
  }

  const auto& lie = targets_.front().value;
  send({kObserverNode}, Reply{frame, 0, lie, value_digest(lie)}, step);
  if (leader_of(frame, 0, quorum_.n()) == id_) lead_view(0, {}, step);
}

void AdversaryReplica::endorse(const Signed<PrePrepare>& pp, Step& step) {
  const Target* t = target_for(pp.body.value);
  if (!t || !endorsed_.emplace(pp.body.view, pp.body.digest).second) return;
  send(t->recipients, Prepare{pp.body.frame, pp.body.view, pp.body.value, pp.body.digest, pp.tag}, step);
  send(t->recipients, Commit{pp.body.frame, pp.body.view, pp.body.value, pp.body.digest}, step);
}

void AdversaryReplica::lead_view(ViewNumber view, std::vector<Signed<ViewChange>> vcs, Step& step) {
  if (!led_.insert(view).second) return;
  for (const auto& t : targets_) {
    PrePrepare body{*frame_, view, t.value, value_digest(t.value)};
    auto pp = sign_body(signer_, body);
    if (view == 0) {
      send(t.recipients, body, step);
    } else {
      send(t.recipients, NewView{*frame_, view, vcs, pp}, step);
    }
    endorse(pp, step);
  }
}

void AdversaryReplica::on_message(const SignedMessage& message, Round, Step& step) {
  if (!frame_ || targets_.empty()) return;
  const ModuleId from = message.signer();
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, StateRequest>) {
          // Claims to know nothing, hoping to drag the rejoiner to genesis.
          send({from}, StateSnapshot{std::nullopt, {}}, step);
        } else if constexpr (std::is_same_v<T, StateSnapshot> || std::is_same_v<T, CheckpointAttest> ||
                             std::is_same_v<T, Reply>) {
          return;
        } else {
          if (m.frame != *frame_) return;
          if constexpr (std::is_same_v<T, PrePrepare>) {
            endorse(Signed<PrePrepare>{m, message.tag}, step);
          } else if constexpr (std::is_same_v<T, Prepare>) {
            endorse(Signed<PrePrepare>{PrePrepare{m.frame, m.view, m.value, m.digest}, m.proposal_tag}, step);
          } else if constexpr (std::is_same_v<T, NewView>) {
            endorse(m.proposal, step);
          } else if constexpr (std::is_same_v<T, ViewChange>) {
            if (m.new_view == 0) return;
            auto& pool = view_changes_[m.new_view];
            pool.emplace(from, Signed<ViewChange>{m, message.tag});
            if (vc_sent_.insert(m.new_view).second) {
              ViewChange own{*frame_, m.new_view, std::nullopt};
              pool.emplace(id_, sign_body(signer_, own));
              std::vector<NodeId> everyone;
              for (ModuleId x = 0; x < quorum_.n(); ++x) {
                if (x != id_) everyone.push_back(x);
              }
              send(everyone, own, step);
            }
            if (leader_of(*frame_, m.new_view, quorum_.n()) == id_ && pool.size() >= quorum_.quorum()) {
              // Prefer view changes without certificates to dodge the carry-over rule.
              std::vector<Signed<ViewChange>> vcs;
              for (bool with_cert : {false, true}) {
                for (const auto& [signer, vc] : pool) {
                  if (vc.body.certificate.has_value() == with_cert && vcs.size() < quorum_.quorum()) {
                    vcs.push_back(vc);
                  }
                }
              }
              lead_view(m.new_view, std::move(vcs), step);
            }
          }
        }
      },
      message.message);
}

}  // namespace bftguard
