// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

// Release gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bftguard/quorum/crypto.hpp"
#include "bftguard/quorum/messages.hpp"
#include "bftguard/quorum/quorum.hpp"
#include "bftguard/scenario/campaign.hpp"
#include "bftguard/scenario/episode.hpp"
#include "bftguard/voter/voter.hpp"
#include "oracles.hpp"
#include "schedule_explorer.hpp"

namespace {

using namespace bftguard;
using Clock = std::chrono::steady_clock;

const std::filesystem::path kScenarioDir = BFTGUARD_SCENARIO_DIR;

Scenario load(const std::string& name) { return parse_scenario(kScenarioDir / (name + ".scn")); }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects failed checks for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 8) failures_.push_back(what);
    ok_ = ok_ && ok;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : ", ") + s; }
  bool ok() const { return ok_; }
  const std::vector<std::string>& failures() const { return failures_; }
  const std::string& notes() const { return notes_; }

 private:
  bool ok_ = true;
  std::vector<std::string> failures_;
  std::string notes_;
};

std::vector<std::string> record_lines(const EpisodeResult& r) {
  std::vector<std::string> out;
  for (const auto& rec : r.records) out.push_back(format_record(rec));
  return out;
}

void quorum_arithmetic(Check& c) {
  const auto t0 = Clock::now();
  const std::uint32_t expected[4][3] = {{1, 1, 1}, {4, 3, 2}, {7, 5, 3}, {10, 7, 4}};
  for (std::uint32_t f = 0; f <= 3; ++f) {
    const auto tag = " f=" + std::to_string(f);
    c.expect(min_replicas(f) == expected[f][0] && min_replicas(f) == testing::search_min_replicas(f),
             "min_replicas" + tag);
    c.expect(quorum_size(f) == expected[f][1] && quorum_size(f) == testing::search_quorum_size(f),
             "quorum_size" + tag);
    c.expect(client_match(f) == expected[f][2] && client_match(f) == testing::search_client_match(f),
             "client_match" + tag);
    if (f > 0) {
      c.expect(testing::min_quorum_intersection(min_replicas(f), quorum_size(f)) >= f + 1, "intersection" + tag);
    }
  }
  const double s = seconds_since(t0);
  c.expect(s < 1.0, "took longer than 1 s");
  c.note(std::to_string(s).substr(0, 5) + " s");
}

struct Campaigns {
  CampaignReport n4;
  CampaignReport n7;
  double seconds = 0;
};

Campaigns run_campaigns() {
  Campaigns out;
  const auto t0 = Clock::now();
  out.n4 = fuzz_campaign(load("fuzz_n4"), CampaignOptions{1000, 0, 1, std::nullopt});
  out.n7 = fuzz_campaign(load("fuzz_n7"), CampaignOptions{1000, 0, 1, std::nullopt});
  out.seconds = seconds_since(t0);
  return out;
}

void agreement_under_fuzz(Check& c, const Campaigns& k) {
  for (const auto* rep : {&k.n4, &k.n7}) {
    c.expect(rep->episodes == 1000, rep->scenario + " ran " + std::to_string(rep->episodes) + " episodes");
    c.expect(rep->agreement_violations == 0,
             rep->scenario + ": " + std::to_string(rep->agreement_violations) + " agreement violations " +
                 rep->first_failure_detail);
  }
  c.expect(k.seconds < 60.0, "campaigns took " + std::to_string(k.seconds) + " s");
  c.note(std::to_string(k.n4.frames + k.n7.frames) + " frames, " + std::to_string(k.seconds).substr(0, 5) + " s");
}

void liveness(Check& c, const Campaigns& k) {
  for (const auto* rep : {&k.n4, &k.n7}) {
    const Scenario base = load(rep->scenario);
    const auto bound = liveness_bound(base.f, base.timeout_rounds);
    c.expect(rep->liveness_bound == bound, rep->scenario + " reports bound " + std::to_string(rep->liveness_bound));
    c.expect(rep->liveness_failures == 0, rep->scenario + ": " + std::to_string(rep->liveness_failures) +
                                              " liveness failures " + rep->first_failure_detail);
    c.expect(rep->max_rounds <= bound, rep->scenario + " max rounds " + std::to_string(rep->max_rounds));
    c.expect(rep->max_view_changes <= base.f + 1,
             rep->scenario + " max view changes " + std::to_string(rep->max_view_changes));
    std::uint64_t counted = 0;
    for (const auto& [rounds, n] : rep->rounds_histogram) {
      c.expect(rounds <= bound, rep->scenario + " histogram holds " + std::to_string(rounds) + " rounds");
      counted += n;
    }
    c.expect(counted == rep->frames, rep->scenario + " has undecided frames");
    c.note(rep->scenario + " max " + std::to_string(rep->max_rounds) + "/" + std::to_string(bound) + " rounds, " +
           std::to_string(rep->max_view_changes) + " vc");
  }
}

bool same_verdict(const Verdict& v, const testing::OracleVerdict& o) {
  if (const auto* d = std::get_if<Decided>(&v)) {
    return o.decided && d->value.label() == o.value && d->supporters == o.supporters;
  }
  return !o.decided && std::holds_alternative<NoQuorum>(v);
}

void voter_oracle(Check& c) {
  const auto t0 = Clock::now();
  const auto keys = KeyRegistry::create(99, 5);
  const std::vector<std::string> all = {"a", "b", "c"};
  std::uint64_t cases = 0;
  for (std::size_t width = 1; width <= all.size(); ++width) {
    const std::vector<std::string> labels(all.begin(), all.begin() + static_cast<long>(width));
    const DecisionSpace space(labels, labels[0]);
    for (std::uint32_t n = 1; n <= 5; ++n) {
      const QuorumConfig q(n, 0);
      for (const auto& a : testing::all_assignments(n, labels)) {
        std::vector<ModuleOutput> outs;
        for (ModuleId m = 0; m < n; ++m) {
          if (a[m]) outs.push_back(make_output(keys->signer_for(m), 0, space.value(*a[m]), 1.0));
        }
        auto check = [&](const VoteStrategy& s, testing::OracleRule rule, std::uint32_t k) {
          ++cases;
          if (!same_verdict(tally(outs, s, q), testing::brute_force_vote(a, labels, rule, k))) {
            c.expect(false, "mismatch n=" + std::to_string(n) + " " + to_string(s));
          }
        };
        check(Majority{}, testing::OracleRule::kMajority, 0);
        check(Unanimity{}, testing::OracleRule::kUnanimity, 0);
        for (std::uint32_t k = 2; k <= n; ++k) check(KofN{k}, testing::OracleRule::kKofN, k);
      }
    }
  }
  const double s = seconds_since(t0);
  c.expect(s < 5.0, "took " + std::to_string(s) + " s");
  c.note(std::to_string(cases) + " cases, " + std::to_string(s).substr(0, 5) + " s");
}

void scenario_reproduction(Check& c) {
  auto expect_lines = [&](const std::string& name, const std::vector<std::string>& want) {
    const auto got = record_lines(run_episode(load(name)));
    c.expect(got == want, name + " decision log differs");
  };
  std::vector<std::string> bag;
  std::vector<std::string> obstacle;
  for (int i = 0; i < 5; ++i) {
    bag.push_back(std::to_string(i) + "|decided|continue|0,1,2,3|1|0|-");
    obstacle.push_back(std::to_string(i) + "|decided|stop|0,1,3,4|1|0|-");
  }
  expect_lines("av_plastic_bag", bag);
  expect_lines("av_missed_obstacle", obstacle);
  // Frames 0 and 4: two of three see the alarm. Frame 1: only one does.
  expect_lines("voter_thresholds_2oo3", {
                                            "0|decided|alarm|0,1|1|0|-",
                                            "1|decided|quiet|1,2|1|0|-",
                                            "2|decided|alarm|0,1,2|1|0|-",
                                            "3|decided|quiet|0,1,2|1|0|-",
                                            "4|decided|alarm|1,2|1|0|-",
                                        });
  const auto keys = KeyRegistry::create(1, 3);
  const DecisionSpace space({"alarm", "quiet"}, "alarm");
  const std::vector<ModuleOutput> lone = {make_output(keys->signer_for(0), 0, space.value("alarm"), 1.0)};
  c.expect(std::holds_alternative<NoQuorum>(tally(lone, KofN{2}, QuorumConfig(3, 0))), "1-of-3 alarm triggered");
}

void equivocation_safety(Check& c) {
  const auto t0 = Clock::now();
  std::uint64_t leaves = 0;
  struct Case {
    std::vector<std::string> outputs;
    std::uint32_t depth;
    bool must_depose;
  };
  // Module 0 leads view 0 and tells half the replicas "continue", the rest
  // "brake". The first case gives neither side honest support.
  for (const auto& cs : std::vector<Case>{{{"-", "stop", "stop", "stop"}, 5, true},
                                          {{"-", "continue", "brake", "brake"}, 4, false},
                                          {{"-", "brake", "continue", "brake"}, 4, false},
                                          {{"-", "continue", "continue", "continue"}, 4, false}}) {
    testing::ExplorerSetup setup;
    setup.labels = {"continue", "brake", "stop"};
    setup.outputs = cs.outputs;
    setup.adversary = 0;
    setup.adversary_profile = ByzantineEquivocate{"continue", "brake"};
    testing::ExplorerLimits limits;
    limits.depth = cs.depth;
    const auto st = testing::explore_schedules(setup, limits);
    const std::string tag = cs.outputs[1] + "," + cs.outputs[2] + "," + cs.outputs[3];
    leaves += st.leaves;
    c.expect(st.leaves > 0, tag + ": no leaves explored");
    c.expect(st.agreement_violations == 0, tag + ": agreement violated");
    c.expect(st.certificate_conflicts == 0, tag + ": conflicting certificates");
    c.expect(st.committed_values.size() <= 1, tag + ": several committed values");
    if (cs.must_depose) {
      c.expect(st.undecided_leaves == 0, tag + ": undecided leaves");
      c.expect(st.committed_in_view0 == 0, tag + ": equivocator's view committed");
      c.expect(st.max_view >= 1, tag + ": leader never deposed");
    }
  }

  // The same leader inside a full episode is deposed by a view change.
  const Scenario s = parse_scenario_text(
      "name = equivocating_leader\nf = 1\nmode = pbft\nseed = 5\n\n"
      "[decision_space]\nlabels = continue brake\nsafe_default = brake\n\n[supervisor]\nenabled = false\n\n"
      "[module 0]\nprofile = byzantine_equivocate:continue:brake\n\n[observations]\n0..3 | continue | - | 4*continue\n");
  const auto r = run_episode(s);
  c.expect(r.records.at(0).view_changes >= 1, "episode leader not deposed");
  c.expect(r.metrics.agreement_violations == 0, "episode agreement violated");
  c.note(std::to_string(leaves) + " leaves, " + std::to_string(seconds_since(t0)).substr(0, 5) + " s");
}

void common_mode(Check& c) {
  const Scenario s = load("common_mode_breach");
  const auto r = run_episode(s);
  std::size_t wrong = 0;
  for (const auto& rec : r.records) {
    const std::string truth = s.observations.ground_truth(*s.space, rec.frame).label();
    const bool differs = rec.value && *rec.value != truth;
    c.expect(differs == rec.ground_truth_mismatch, "frame " + std::to_string(rec.frame) + " flag does not match");
    wrong += differs ? 1 : 0;
  }
  c.expect(wrong >= 1, "no frame committed a wrong value");
  c.expect(s.faulty_count() == s.f + 1, "scenario does not exceed f");
  c.note(std::to_string(wrong) + "/" + std::to_string(r.records.size()) + " frames flagged");
}

void supervisor_cycle(Check& c) {
  const Scenario s = load("supervisor_cycle");
  const auto r = run_episode(s);
  const std::uint32_t grace = 2;

  // Frame index of each supervisor row, from its place among record rows.
  std::map<SupervisorEventKind, Frame> frame_of;
  std::map<SupervisorEventKind, ModuleId> module_of;
  std::size_t records_seen = 0;
  for (const auto& line : r.decision_lines) {
    if (line.empty() || line[0] == '#') continue;
    const auto at = line.find("|SUPERVISOR|");
    if (at == std::string::npos) {
      ++records_seen;
      continue;
    }
    const std::string rest = line.substr(at + 12);
    const ModuleId m = static_cast<ModuleId>(std::stoul(rest.substr(0, rest.find('|'))));
    const std::string kind = rest.substr(rest.find('|') + 1);
    for (auto k : {SupervisorEventKind::kFlagged, SupervisorEventKind::kIsolated, SupervisorEventKind::kRecovered}) {
      if (kind == event_name(k) && !frame_of.count(k)) {
        frame_of[k] = static_cast<Frame>(records_seen);
        module_of[k] = m;
      }
    }
  }
  const bool all = frame_of.size() == 3;
  c.expect(all, "missing supervisor events");
  if (!all) return;
  for (const auto& [k, m] : module_of) c.expect(m == 3, "event for module " + std::to_string(m));
  c.expect(frame_of[SupervisorEventKind::kFlagged] <= s.supervisor.window + grace, "flagged too late");
  c.expect(frame_of[SupervisorEventKind::kIsolated] == frame_of[SupervisorEventKind::kFlagged],
           "not isolated when flagged");
  c.expect(frame_of[SupervisorEventKind::kRecovered] > frame_of[SupervisorEventKind::kIsolated], "never restarted");

  const auto& events = r.events->lines();
  const bool transferred = std::any_of(events.begin(), events.end(), [](const std::string& l) {
    return l.find("|3|STATE_SNAPSHOT|") != std::string::npos;
  });
  c.expect(transferred, "no state snapshot reached module 3");

  const Frame back = frame_of[SupervisorEventKind::kRecovered];
  bool counted = false;
  for (ModuleId peer = 0; peer < 3; ++peer) {
    for (const auto& v : r.vote_logs[peer]) {
      if (v.kind == MessageKind::kPrepare && v.frame >= back && v.signers.size() >= s.quorum().quorum() &&
          std::count(v.signers.begin(), v.signers.end(), 3u)) {
        counted = true;
      }
    }
  }
  c.expect(counted, "module 3's Prepare never counted toward a peer's quorum after recovery");
  c.note("flagged after frame " + std::to_string(frame_of[SupervisorEventKind::kFlagged] - 1) + ", recovered after frame " +
         std::to_string(back - 1));
}

void determinism(Check& c) {
  std::size_t runs = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kScenarioDir)) {
    if (entry.path().extension() != ".scn") continue;
    const Scenario s = parse_scenario(entry.path());
    const auto a = run_episode(s);
    const auto b = run_episode(s);
    c.expect(a.decision_log() == b.decision_log(), s.name + " decision log differs");
    c.expect(a.events->text() == b.events->text(), s.name + " event log differs");
    ++runs;
  }
  for (const char* name : {"fuzz_n4", "fuzz_n7"}) {
    const auto a = fuzz_campaign(load(name), CampaignOptions{100, 31, 1, std::nullopt});
    const auto b = fuzz_campaign(load(name), CampaignOptions{100, 31, 2, std::nullopt});
    c.expect(a.digest == b.digest && a.text() == b.text(), std::string(name) + " campaign differs");
    const auto one = run_fuzz_episode(load(name), 31, 57, 1);
    const auto two = run_fuzz_episode(load(name), 31, 57, 1);
    c.expect(one.decision_digest == two.decision_digest && one.event_digest == two.event_digest,
             std::string(name) + " replayed episode differs");
  }
  c.note(std::to_string(runs) + " scenarios, 2 campaigns");
}

void fast_path(Check& c) {
  const auto r = run_episode(load("fastpath_lane_keep"));
  c.expect(record_lines(r) == std::vector<std::string>{
                                  "0|decided|keep|0,1,2,3|1|0|-",
                                  "1|decided|keep|0,1,2,3|1|0|-",
                                  "2|decided|keep|0,1,2,3|1|0|-",
                                  "3|decided|keep|0,1,3|2|0|-",
                                  "4|decided|keep|0,1,2,3|1|0|-",
                                  "5|decided|right|0,2,3|2|0|-",
                              },
           "fastpath_lane_keep decision log differs");

  // Every single-dissent placement for N=4 and N=7.
  std::size_t episodes = 0;
  for (std::uint32_t f : {1u, 2u}) {
    const std::uint32_t n = 3 * f + 1;
    std::ostringstream rows;
    rows << "0 | keep | - | " << n << "*keep\n";
    for (ModuleId m = 0; m < n; ++m) {
      for (const char* other : {"left", "right"}) {
        rows << (1 + 2 * m + (other[0] == 'r')) << " | keep | - |";
        for (ModuleId k = 0; k < n; ++k) rows << " " << (k == m ? other : "keep");
        rows << "\n";
      }
    }
    const Scenario s = parse_scenario_text("name = fast\nf = " + std::to_string(f) +
                                           "\nmode = vote-only\nstrategy = fastpath\nseed = 3\n\n"
                                           "[decision_space]\nlabels = keep left right\nsafe_default = keep\n\n"
                                           "[supervisor]\nenabled = false\n\n[observations]\n" +
                                           rows.str());
    const auto e = run_episode(s);
    for (const auto& rec : e.records) {
      const Round want = rec.frame == 0 ? 1 : 2;
      c.expect(rec.verdict == VerdictKind::kDecided && rec.value == "keep" && rec.rounds == want,
               "n=" + std::to_string(n) + " frame " + std::to_string(rec.frame) + ": " + format_record(rec));
      ++episodes;
    }
  }
  c.note(std::to_string(episodes) + " generated frames");
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Check&)> run;
  };
  std::optional<Campaigns> campaigns;
  auto fuzzed = [&]() -> const Campaigns& {
    if (!campaigns) campaigns = run_campaigns();
    return *campaigns;
  };
  const std::vector<Criterion> criteria = {
      {"quorum arithmetic", quorum_arithmetic},
      {"agreement under fuzz", [&](Check& c) { agreement_under_fuzz(c, fuzzed()); }},
      {"liveness bound", [&](Check& c) { liveness(c, fuzzed()); }},
      {"voter oracle equivalence", voter_oracle},
      {"scenario reproduction", scenario_reproduction},
      {"equivocation safety", equivocation_safety},
      {"common-mode demonstration", common_mode},
      {"supervisor cycle", supervisor_cycle},
      {"determinism", determinism},
      {"fast path", fast_path},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      criteria[i].run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("threw: ") + e.what());
    }
    std::printf("[%s] %2zu %s%s%s%s\n", c.ok() ? "PASS" : "FAIL", i + 1, criteria[i].name,
                c.notes().empty() ? "" : " (", c.notes().c_str(), c.notes().empty() ? "" : ")");
    for (const auto& f : c.failures()) std::printf("         - %s\n", f.c_str());
    std::fflush(stdout);
    failed += c.ok() ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
