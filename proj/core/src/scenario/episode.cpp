// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include "bftguard/scenario/episode.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "bftguard/harness/adversary.hpp"
#include "bftguard/harness/module.hpp"

namespace bftguard {
namespace {

std::string join_ids(const std::vector<ModuleId>& ids) {
  if (ids.empty()) return "-";
  std::string out;
  for (ModuleId id : ids) out += (out.empty() ? "" : ",") + std::to_string(id);
  return out;
}

std::string input_line(Round round, ModuleId to, const InputDispatch& input) {
  return std::to_string(round) + "|" + node_name(kEnvironmentNode) + "|" + node_name(to) + "|" +
         std::string(kind_name(MessageKind::kInput)) + "|" + digest(input.canonical_bytes()).hex();
}

/// What the observer learned from modules' own outputs in one frame.
class OutputBook {
 public:
  void add(const ModuleOutput& o) {
    auto& list = by_module_[o.module_id];
    for (const auto& existing : list) {
      if (existing.value == o.value) return;
    }
    list.push_back(o);
  }
  void announce(ModuleId m, const Digest& d) { announced_.emplace(m, d); }

  bool equivocated(ModuleId m) const {
    auto it = by_module_.find(m);
    return it != by_module_.end() && it->second.size() > 1;
  }
  /// Single unambiguous output of `m`, if any.
  const ModuleOutput* output(ModuleId m) const {
    auto it = by_module_.find(m);
    if (it == by_module_.end() || it->second.size() != 1) return nullptr;
    return &it->second.front();
  }
  std::vector<ModuleOutput> usable() const {
    std::vector<ModuleOutput> out;
    for (const auto& [m, list] : by_module_) {
      if (list.size() == 1) out.push_back(list.front());
    }
    return out;
  }
  std::size_t senders() const noexcept { return by_module_.size(); }
  const std::map<ModuleId, Digest>& announcements() const noexcept { return announced_; }

  std::optional<DecisionValue> value_of(ModuleId m, const DecisionSpace& space) const {
    if (const auto* o = output(m)) return o->value;
    auto it = announced_.find(m);
    if (it == announced_.end()) return std::nullopt;
    for (std::size_t i = 0; i < space.size(); ++i) {
      if (value_digest(space.at(i)) == it->second) return space.at(i);
    }
    return std::nullopt;
  }

 private:
  std::map<ModuleId, std::vector<ModuleOutput>> by_module_;
  std::map<ModuleId, Digest> announced_;
};

/// One module's side of the hash fast path.
struct FastAgent {
  bool active = false;
  bool honest = true;
  std::vector<std::pair<ModuleOutput, std::vector<NodeId>>> sends;  // output and its recipients
  std::map<ModuleId, Digest> announcements;
  std::map<ModuleId, ModuleOutput> fulls;
  bool sent_full = false;
  std::optional<Verdict> verdict;
};

class Episode {
 public:
  Episode(const Scenario& s, const RunOptions& options)
      : s_(s),
        q_(s.quorum()),
        keys_(KeyRegistry::create(mix64(s.seed ^ 0x6b65792d736565ULL), s.n)),
        verifier_(keys_->verifier()),
        log_(std::make_shared<EventLog>(options.event_mode)),
        net_(network_policy(s), log_),
        ccfg_{q_, s.timeout_rounds, s.checkpoint_interval, s.equivocation_fast_path, s.effective_retransmit()} {
    for (ModuleId m = 0; m < s.n; ++m) {
      modules_.emplace_back(m, s.modules[m], keys_->signer_for(m), s.space, s.seed);
    }
    parts_.resize(s.n);
    crashed_.assign(s.n, false);
    if (s.mode == ConsensusMode::kPbft) {
      for (ModuleId m = 0; m < s.n; ++m) parts_[m] = make_participant(m);
    }
    if (s.supervisor_enabled) sup_.emplace(q_, s.supervisor);
    result_.scenario_name = s.name;
    result_.events = log_;
    result_.vote_logs.resize(s.n);
    result_.commits.resize(s.n);
    result_.violations.resize(s.n);
  }

  EpisodeResult run() {
    header();
    for (Frame frame = 0; frame < s_.frames(); ++frame) run_frame(frame);
    for (ModuleId m = 0; m < s_.n; ++m) harvest(m);
    result_.metrics.total_rounds = net_.round();
    result_.metrics.messages_sent = net_.sent_count();
    result_.metrics.messages_dropped = net_.dropped_count();
    if (sup_) result_.supervisor_events = sup_->events();
    return std::move(result_);
  }

 private:
  static NetworkPolicy network_policy(const Scenario& s) {
    NetworkPolicy p = s.network;
    p.seed = mix64(s.seed ^ mix64(s.network.seed));
    return p;
  }

  std::unique_ptr<Participant> make_participant(ModuleId m) {
    const FaultProfile& profile = modules_[m].profile();
    if (std::holds_alternative<Silent>(profile)) return std::make_unique<MuteParticipant>(m);
    if (is_byzantine(profile)) {
      return std::make_unique<AdversaryReplica>(m, q_, keys_->signer_for(m), profile, s_.space,
                                                s_.modules[m].equivocate_split);
    }
    return std::make_unique<Replica>(m, ccfg_, keys_->signer_for(m), verifier_, s_.space);
  }

  std::uint32_t send_delay(ModuleId m) const {
    if (const auto* slow = std::get_if<Slow>(&modules_[m].profile())) return slow->delay_rounds;
    return 0;
  }

  bool protocol_honest(ModuleId m) const {
    return started_[m] && dynamic_cast<const Replica*>(parts_[m].get()) != nullptr && !crashed_[m] &&
           modules_[m].state().status() == ModuleStatus::kActive;
  }

  bool byzantine_class(ModuleId m) const { return is_byzantine(modules_[m].profile()); }

  void harvest(ModuleId m) {
    const auto* r = dynamic_cast<const Replica*>(parts_[m].get());
    if (!r) return;
    auto& votes = result_.vote_logs[m];
    votes.insert(votes.end(), r->vote_log().begin() + static_cast<long>(harvested_votes_[m]), r->vote_log().end());
    harvested_votes_[m] = r->vote_log().size();
    auto& viol = result_.violations[m];
    viol.insert(viol.end(), r->violations().begin() + static_cast<long>(harvested_violations_[m]),
                r->violations().end());
    harvested_violations_[m] = r->violations().size();
    result_.metrics.leader_equivocations_seen += r->leader_equivocations().size() - harvested_equivocations_[m];
    harvested_equivocations_[m] = r->leader_equivocations().size();
  }

  void replace_participant(ModuleId m, std::unique_ptr<Participant> p) {
    harvest(m);
    parts_[m] = std::move(p);
    harvested_votes_[m] = 0;
    harvested_violations_[m] = 0;
    harvested_equivocations_[m] = 0;
  }

  void header() {
    auto& lines = result_.decision_lines;
    lines.push_back("# bftguard decision log");
    std::ostringstream h;
    h << "# scenario=" << s_.name << " n=" << s_.n << " f=" << s_.f << " mode=" << mode_name(s_.mode)
      << " strategy=" << to_string(s_.strategy) << " seed=" << s_.seed
      << " expects_violation=" << (s_.expects_violation ? "true" : "false");
    lines.push_back(h.str());
    std::string truth = "# ground_truth=";
    for (std::size_t f = 0; f < s_.frames(); ++f) truth += (f ? "," : "") + s_.observations.row(f).ground_truth;
    lines.push_back(truth);
    lines.push_back("# frame|verdict|value|supporters|rounds|view_changes|flags");
  }

  // -------------------------------------------------------------------------

  void run_frame(Frame frame) {
    frame_ = frame;
    start_ = net_.round();
    book_ = OutputBook{};
    frame_commits_.clear();
    finalized_.reset();
    replies_.clear();

    // Crash-at-frame replicas fall silent for good.
    for (ModuleId m = 0; m < s_.n; ++m) {
      if (const auto* c = std::get_if<Crash>(&modules_[m].profile()); c && frame >= c->at_frame && !crashed_[m]) {
        crashed_[m] = true;
        if (parts_[m]) replace_participant(m, std::make_unique<MuteParticipant>(m));
      }
    }

    // Vote-only restarts have no replica state to transfer.
    if (s_.mode == ConsensusMode::kVoteOnly && sup_) {
      for (ModuleId m = 0; m < s_.n; ++m) {
        if (modules_[m].state().status() == ModuleStatus::kRestarting) recover(m, std::nullopt, start_);
      }
    }

    std::vector<Production> produced(s_.n, Production{NoOutput{}});
    for (ModuleId m = 0; m < s_.n; ++m) {
      if (modules_[m].state().status() != ModuleStatus::kActive) continue;
      const DecisionValue obs = s_.observations.observed(*s_.space, frame, m);
      log_->append(input_line(start_, m, InputDispatch{frame, m, obs}));
      produced[m] = modules_[m].produce_output(frame, obs);
    }

    switch (s_.mode) {
      case ConsensusMode::kPbft: run_pbft(produced); break;
      case ConsensusMode::kVoteOnly:
        if (std::holds_alternative<FastPathThenMajority>(s_.strategy)) {
          run_fast_path(produced);
        } else {
          run_vote(produced);
        }
        break;
    }
  }

  void send_outputs_to_observer(ModuleId m, const Production& p) {
    if (const auto* o = std::get_if<ModuleOutput>(&p)) {
      net_.send(m, kObserverNode, *o, send_delay(m));
    } else if (const auto* e = std::get_if<EquivocatedOutputs>(&p)) {
      net_.send(m, kObserverNode, e->a, send_delay(m));
      net_.send(m, kObserverNode, e->b, send_delay(m));
    }
  }

  void observe_output(const Envelope& env) {
    const auto& o = std::get<ModuleOutput>(env.payload);
    if (o.frame != frame_ || o.module_id != env.from || !o.verify(verifier_)) return;
    book_.add(o);
  }

  void dispatch(ModuleId m, Step& step, Round now) {
    for (auto& ob : step.out) net_.send(m, ob.to, ob.message, send_delay(m));
    if (step.committed) {
      const auto& c = *step.committed;
      result_.commits[m][c.frame] = c.value.label();
      modules_[m].state().note_commit(c.frame);
      if (c.frame == frame_ && !byzantine_class(m)) frame_commits_[m] = c.value.label();
    }
    if (step.state_transferred) recover(m, *step.state_transferred, now);
  }

  void recover(ModuleId m, std::optional<Frame> snapshot_frame, Round now) {
    modules_[m].state().complete_restart(snapshot_frame);
    if (sup_) sup_->mark_recovered(m, now);
  }

  // -------------------------------------------------------------------------
  // PBFT

  void run_pbft(const std::vector<Production>& produced) {
    started_.assign(s_.n, false);
    for (ModuleId m = 0; m < s_.n; ++m) {
      if (modules_[m].state().status() != ModuleStatus::kActive) continue;
      started_[m] = true;
      send_outputs_to_observer(m, produced[m]);
      std::optional<ModuleOutput> own;
      if (const auto* o = std::get_if<ModuleOutput>(&produced[m])) own = *o;
      if (const auto* e = std::get_if<EquivocatedOutputs>(&produced[m])) own = e->a;
      Step step;
      parts_[m]->start_frame(frame_, own, start_, step);
      dispatch(m, step, start_);
    }

    const std::uint64_t budget = static_cast<std::uint64_t>(s_.f + 2) * s_.timeout_rounds + 3;
    while (true) {
      const Round now = net_.round();
      if (finalized_) {
        bool all = true;
        for (ModuleId m = 0; m < s_.n; ++m) {
          if (protocol_honest(m) && !frame_commits_.count(m)) all = false;
        }
        if (all || now - finalized_->round >= s_.timeout_rounds) break;
      } else if (now - start_ >= budget) {
        break;
      }
      step_round();
    }
    close_frame();
  }

  bool drives(ModuleId m) const {
    const auto st = modules_[m].state().status();
    return parts_[m] && st != ModuleStatus::kIsolated;
  }

  void deliver(const std::vector<Envelope>& envs) {
    for (const auto& env : envs) {
      if (env.to == kObserverNode) {
        if (std::holds_alternative<ModuleOutput>(env.payload)) {
          observe_output(env);
        } else if (const auto* sm = std::get_if<SignedMessage>(&env.payload)) {
          observe_reply(env, *sm);
        }
        continue;
      }
      if (env.to >= s_.n || !drives(env.to)) continue;
      if (const auto* sm = std::get_if<SignedMessage>(&env.payload)) {
        Step step;
        parts_[env.to]->on_message(*sm, net_.round(), step);
        dispatch(env.to, step, net_.round());
      }
    }
  }

  void step_round() {
    deliver(net_.advance_round());
    for (auto due = net_.collect_due(); !due.empty(); due = net_.collect_due()) deliver(due);
    const Round now = net_.round();
    for (ModuleId m = 0; m < s_.n; ++m) {
      if (!drives(m)) continue;
      Step step;
      parts_[m]->on_tick(now, step);
      dispatch(m, step, now);
    }
    for (auto due = net_.collect_due(); !due.empty(); due = net_.collect_due()) deliver(due);
  }

  struct Finalized {
    DecisionValue value;
    Round round;
    Round rounds_to_commit;
    ViewNumber view;
  };

  struct ReplySeen {
    Digest digest;
    Round send_round;
    ViewNumber view;
  };

  void observe_reply(const Envelope& env, const SignedMessage& sm) {
    const auto* reply = std::get_if<Reply>(&sm.message);
    if (!reply || reply->frame != frame_ || sm.signer() != env.from || env.from >= s_.n) return;
    if (!s_.space->contains(reply->value.label()) || reply->digest != value_digest(reply->value)) return;
    if (!verify_message(sm, verifier_)) return;
    if (replies_.count(sm.signer())) return;
    replies_.emplace(sm.signer(), ReplySeen{reply->digest, env.send_round, reply->view});
    if (finalized_) return;
    std::uint32_t matching = 0;
    Round latest = 0;
    ViewNumber view = 0;
    for (const auto& [signer, seen] : replies_) {
      if (seen.digest != reply->digest) continue;
      ++matching;
      latest = std::max(latest, seen.send_round);
      view = std::max(view, seen.view);
    }
    if (matching >= s_.reply_threshold()) {
      finalized_ = Finalized{reply->value, net_.round(), latest - start_, view};
    }
  }

  // -------------------------------------------------------------------------
  // Vote-only

  void run_vote(const std::vector<Production>& produced) {
    std::uint32_t expected = 0;
    for (ModuleId m = 0; m < s_.n; ++m) {
      if (modules_[m].state().status() != ModuleStatus::kActive) continue;
      ++expected;
      send_outputs_to_observer(m, produced[m]);
    }
    while (book_.senders() < expected && net_.round() - start_ < s_.timeout_rounds) {
      for (const auto& env : net_.advance_round()) {
        if (env.to == kObserverNode && std::holds_alternative<ModuleOutput>(env.payload)) observe_output(env);
      }
    }
    const auto outputs = book_.usable();
    Verdict v = tally(outputs, s_.strategy, q_);
    close_vote_frame(std::move(v), net_.round() - start_);
  }

  // -------------------------------------------------------------------------
  // Hash fast path with full-output fallback

  std::vector<NodeId> everyone_but(ModuleId m) const {
    std::vector<NodeId> out;
    for (ModuleId x = 0; x < s_.n; ++x) {
      if (x != m) out.push_back(x);
    }
    return out;
  }

  void run_fast_path(const std::vector<Production>& produced) {
    agents_.assign(s_.n, FastAgent{});
    for (ModuleId m = 0; m < s_.n; ++m) {
      FastAgent& a = agents_[m];
      if (modules_[m].state().status() != ModuleStatus::kActive) continue;
      a.active = true;
      a.honest = !byzantine_class(m);
      if (const auto* o = std::get_if<ModuleOutput>(&produced[m])) {
        auto to = everyone_but(m);
        to.push_back(kObserverNode);
        a.sends.emplace_back(*o, to);
      } else if (const auto* e = std::get_if<EquivocatedOutputs>(&produced[m])) {
        std::vector<ModuleId> side_a = s_.modules[m].equivocate_split;
        if (side_a.empty()) side_a = default_equivocation_side_a(m, s_.n);
        std::vector<NodeId> to_a{kObserverNode}, to_b;
        for (NodeId x : everyone_but(m)) {
          (std::find(side_a.begin(), side_a.end(), x) != side_a.end() ? to_a : to_b).push_back(x);
        }
        a.sends.emplace_back(e->a, to_a);
        a.sends.emplace_back(e->b, to_b);
      }
      for (const auto& [out, to] : a.sends) {
        net_.send(m, to, make_announcement(keys_->signer_for(m), frame_, out.value), send_delay(m));
        a.announcements[m] = value_digest(a.sends.front().first.value);
        a.fulls.emplace(m, a.sends.front().first);
      }
    }

    std::optional<Verdict> observer;
    Round observer_round = 0;
    const Round budget = 2 * static_cast<Round>(s_.timeout_rounds) + 3;
    while (true) {
      bool agents_done = true;
      for (ModuleId m = 0; m < s_.n; ++m) {
        if (agents_[m].active && agents_[m].honest && !agents_[m].sends.empty() && !agents_[m].verdict) {
          agents_done = false;
        }
      }
      if ((observer && agents_done) || net_.round() - start_ >= budget) break;

      for (const auto& env : net_.advance_round()) fast_deliver(env);
      const Round now = net_.round();
      const Round elapsed = now - start_;
      for (ModuleId m = 0; m < s_.n; ++m) fast_agent_step(m, elapsed);
      if (!observer) {
        observer = fast_observer_step(elapsed);
        observer_round = elapsed;
      }
    }

    result_.metrics.agent_verdicts.emplace_back();
    for (ModuleId m = 0; m < s_.n; ++m) {
      std::string label = "-";
      if (agents_[m].verdict) {
        if (const auto* d = std::get_if<Decided>(&*agents_[m].verdict)) label = d->value.label();
      }
      result_.metrics.agent_verdicts.back().push_back(label);
    }
    if (!observer) {
      observer = tally(book_.usable(), Majority{}, q_);
      observer_round = net_.round() - start_;
    }
    close_vote_frame(std::move(*observer), observer_round);
  }

  void fast_deliver(const Envelope& env) {
    if (env.to == kObserverNode) {
      if (const auto* a = std::get_if<Announcement>(&env.payload)) {
        if (a->frame == frame_ && a->module_id == env.from && a->verify(verifier_)) {
          book_.announce(a->module_id, a->value_digest);
        }
      } else if (std::holds_alternative<ModuleOutput>(env.payload)) {
        observe_output(env);
      }
      return;
    }
    if (env.to >= s_.n || !agents_[env.to].active) return;
    FastAgent& agent = agents_[env.to];
    if (const auto* a = std::get_if<Announcement>(&env.payload)) {
      if (a->frame == frame_ && a->module_id == env.from && a->verify(verifier_)) {
        agent.announcements.emplace(a->module_id, a->value_digest);
      }
    } else if (const auto* o = std::get_if<ModuleOutput>(&env.payload)) {
      if (o->frame == frame_ && o->module_id == env.from && o->verify(verifier_)) agent.fulls.emplace(o->module_id, *o);
    }
  }

  void fast_send_full(ModuleId m) {
    FastAgent& a = agents_[m];
    if (a.sent_full) return;
    a.sent_full = true;
    for (const auto& [out, to] : a.sends) net_.send(m, to, out, send_delay(m));
  }

  void fast_agent_step(ModuleId m, Round elapsed) {
    FastAgent& a = agents_[m];
    if (!a.active || a.sends.empty()) return;
    const bool peer_fell_back = a.fulls.size() > 1;
    if (!a.verdict && !a.sent_full) {
      std::vector<Announcement> anns;
      for (const auto& [id, d] : a.announcements) anns.push_back(Announcement{id, frame_, d, AuthTag{}});
      if (anns.size() == s_.n) {
        if (auto v = fast_path_round(anns, q_, *s_.space)) {
          a.verdict = std::move(*v);
        } else {
          fast_send_full(m);
        }
      } else if (elapsed >= s_.timeout_rounds) {
        fast_send_full(m);
      }
    }
    // Peers that fell back need this module's full output too.
    if (peer_fell_back) fast_send_full(m);
    if (a.sent_full && (!a.verdict || peer_fell_back)) {
      std::size_t expected = 0;
      for (const auto& [id, d] : a.announcements) expected += a.fulls.count(id);
      const bool complete = expected == a.announcements.size() && a.fulls.size() >= a.announcements.size();
      if (complete || elapsed >= 2 * static_cast<Round>(s_.timeout_rounds)) {
        std::vector<ModuleOutput> outs;
        for (const auto& [id, o] : a.fulls) outs.push_back(o);
        a.verdict = tally(outs, Majority{}, q_);
      }
    }
  }

  std::optional<Verdict> fast_observer_step(Round elapsed) {
    const auto& anns = book_.announcements();
    if (anns.size() == s_.n && book_.senders() == 0) {
      std::vector<Announcement> list;
      for (const auto& [id, d] : anns) list.push_back(Announcement{id, frame_, d, AuthTag{}});
      if (auto v = fast_path_round(list, q_, *s_.space)) return v;
    }
    if (elapsed >= s_.timeout_rounds && anns.size() + s_.f < s_.n) {
      return NoQuorum{{}, "missing announcements beyond f"};
    }
    std::size_t have = 0;
    for (const auto& [id, d] : anns) have += book_.output(id) || book_.equivocated(id) ? 1 : 0;
    const bool complete = !anns.empty() && have == anns.size() && book_.senders() > 0;
    if (complete || elapsed >= 2 * static_cast<Round>(s_.timeout_rounds)) {
      return tally(book_.usable(), Majority{}, q_);
    }
    return std::nullopt;
  }

  // -------------------------------------------------------------------------
  // Frame close and bookkeeping

  void close_vote_frame(Verdict v, Round rounds) {
    const bool critical = s_.observations.row(frame_).critical;
    v = escalate(std::move(v), critical, *s_.space);
    DecisionRecord rec{};
    rec.frame = frame_;
    std::optional<DecisionValue> committed;
    if (const auto* d = std::get_if<Decided>(&v)) {
      rec.verdict = VerdictKind::kDecided;
      rec.value = d->value.label();
      rec.supporters = d->supporters;
      rec.rounds = rounds;
      committed = d->value;
    } else if (const auto* sm = std::get_if<SafeMode>(&v)) {
      rec.verdict = VerdictKind::kSafeMode;
      rec.value = sm->value.label();
      rec.safe_mode = true;
    } else {
      rec.verdict = VerdictKind::kNoQuorum;
    }
    finish_record(std::move(rec), committed);
  }

  void close_frame() {
    DecisionRecord rec{};
    rec.frame = frame_;
    std::optional<DecisionValue> committed;
    std::set<std::string> honest_values;
    for (const auto& [m, label] : frame_commits_) honest_values.insert(label);
    if (finalized_) {
      rec.verdict = VerdictKind::kDecided;
      rec.value = finalized_->value.label();
      rec.rounds = finalized_->rounds_to_commit;
      rec.view_changes = finalized_->view;
      committed = finalized_->value;
      for (ModuleId m = 0; m < s_.n; ++m) {
        const auto* o = book_.output(m);
        if (o && o->value == finalized_->value) rec.supporters.push_back(m);
      }
    } else {
      Verdict v = escalate(NoQuorum{{}, "no decision within the round budget"}, s_.observations.row(frame_).critical,
                           *s_.space);
      if (const auto* sm = std::get_if<SafeMode>(&v)) {
        rec.verdict = VerdictKind::kSafeMode;
        rec.value = sm->value.label();
        rec.safe_mode = true;
      } else {
        rec.verdict = VerdictKind::kNoQuorum;
      }
    }
    if (honest_values.size() > 1) {
      rec.agreement_violation = true;
      ++result_.metrics.agreement_violations;
    }
    finish_record(std::move(rec), committed);
  }

  void finish_record(DecisionRecord rec, const std::optional<DecisionValue>& committed) {
    if (rec.verdict == VerdictKind::kDecided && rec.value != s_.observations.row(frame_).ground_truth) {
      rec.ground_truth_mismatch = true;
    }
    result_.decision_lines.push_back(format_record(rec));
    result_.records.push_back(std::move(rec));
    supervise(committed);
  }

  void supervise(const std::optional<DecisionValue>& committed) {
    if (!sup_) return;
    std::vector<ModuleReport> reports;
    for (ModuleId m = 0; m < s_.n; ++m) {
      if (modules_[m].state().status() != ModuleStatus::kActive) continue;
      reports.push_back(ModuleReport{m, book_.value_of(m, *s_.space), book_.equivocated(m)});
    }
    const Round now = net_.round();
    const auto actions = sup_->after_frame(frame_, now, committed, reports);
    for (ModuleId m : actions.isolate) {
      modules_[m].state().isolate();
      net_.quarantine(m);
    }
    for (ModuleId m : actions.restart) {
      modules_[m].restart();
      net_.release(m);
      crashed_[m] = false;
      if (s_.mode == ConsensusMode::kPbft) {
        replace_participant(m, make_participant(m));
        Step step;
        parts_[m]->begin_state_transfer(frame_ + 1, now, step);
        dispatch(m, step, now);
      }
    }
    const auto& events = sup_->events();
    for (; emitted_events_ < events.size(); ++emitted_events_) {
      result_.decision_lines.push_back(format_event(events[emitted_events_]));
    }
  }

  const Scenario& s_;
  QuorumConfig q_;
  std::shared_ptr<const KeyRegistry> keys_;
  Verifier verifier_;
  std::shared_ptr<EventLog> log_;
  Network net_;
  ConsensusConfig ccfg_;
  std::vector<DecisionModule> modules_;
  std::vector<std::unique_ptr<Participant>> parts_;
  std::vector<bool> crashed_;
  std::vector<bool> started_;
  std::optional<Supervisor> sup_;
  EpisodeResult result_;
  std::map<ModuleId, std::size_t> harvested_votes_, harvested_violations_, harvested_equivocations_;
  std::size_t emitted_events_ = 0;

  Frame frame_ = 0;
  Round start_ = 0;
  OutputBook book_;
  std::map<ModuleId, std::string> frame_commits_;
  std::optional<Finalized> finalized_;
  std::map<ModuleId, ReplySeen> replies_;
  std::vector<FastAgent> agents_;
};

}  // namespace

std::string_view verdict_name(VerdictKind kind) noexcept {
  switch (kind) {
    case VerdictKind::kDecided: return "decided";
    case VerdictKind::kNoQuorum: return "no_quorum";
    case VerdictKind::kSafeMode: return "safe_mode";
  }
  return "unknown";
}

std::string format_record(const DecisionRecord& r) {
  std::string flags;
  auto flag = [&](bool on, const char* name) {
    if (on) flags += (flags.empty() ? "" : ",") + std::string(name);
  };
  flag(r.agreement_violation, "agreement-violation");
  flag(r.safe_mode, "safe-mode");
  flag(r.ground_truth_mismatch, "ground-truth-mismatch");
  std::ostringstream o;
  o << r.frame << "|" << verdict_name(r.verdict) << "|" << r.value.value_or("-") << "|" << join_ids(r.supporters)
    << "|" << (r.rounds ? std::to_string(*r.rounds) : "-") << "|" << r.view_changes << "|"
    << (flags.empty() ? "-" : flags);
  return o.str();
}

std::string format_event(const SupervisorEvent& e) {
  return std::to_string(e.round) + "|SUPERVISOR|" + std::to_string(e.module) + "|" + std::string(event_name(e.kind));
}

std::string EpisodeResult::decision_log() const {
  std::string out;
  for (const auto& l : decision_lines) out += l + "\n";
  return out;
}

Digest EpisodeResult::decision_digest() const { return digest(decision_log()); }

EpisodeResult run_episode(const Scenario& scenario, const RunOptions& options) {
  const auto problems = validate_scenario(scenario);
  if (!problems.empty()) throw ScenarioError(problems);
  return Episode(scenario, options).run();
}

}  // namespace bftguard
