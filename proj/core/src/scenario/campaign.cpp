// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include "bftguard/scenario/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include "bftguard/harness/module.hpp"
#include "bftguard/scenario/episode.hpp"

namespace bftguard {
namespace {

FaultProfile random_profile(ModuleRng& rng, const Scenario& base) {
  const auto& labels = base.space->labels();
  auto label = [&] { return labels[rng.below(labels.size())]; };
  switch (rng.below(labels.size() >= 2 ? 7 : 6)) {
    case 0: return DiverseHonest{rng.next(), 0.05 + 0.45 * rng.unit()};
    case 1: return Crash{rng.below(std::max<std::uint64_t>(base.frames(), 1))};
    case 2: return Silent{};
    case 3: return Slow{static_cast<std::uint32_t>(1 + rng.below(3))};
    case 4: return ByzantineFixed{label()};
    case 5: return ByzantineRandom{rng.next()};
    default: {
      const std::size_t a = rng.below(labels.size());
      std::size_t b = rng.below(labels.size() - 1);
      if (b >= a) ++b;
      return ByzantineEquivocate{labels[a], labels[b]};
    }
  }
}

}  // namespace

std::uint64_t episode_seed(std::uint64_t campaign_seed, std::uint64_t index) noexcept {
  return mix64(campaign_seed ^ mix64(index + 1));
}

Scenario randomize_episode(const Scenario& base, std::uint64_t seed, std::uint32_t slots) {
  Scenario s = base;
  ModuleRng rng{seed, 0x66757a7aULL};
  s.seed = rng.next();
  s.supervisor_enabled = false;

  std::vector<ModuleId> order(s.n);
  for (ModuleId m = 0; m < s.n; ++m) order[m] = m;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  const std::uint64_t faulty = rng.below(std::min<std::uint64_t>(slots, s.n) + 1);
  for (std::uint64_t i = 0; i < faulty; ++i) {
    ModuleConfig& m = s.modules[order[i]];
    m.profile = random_profile(rng, base);
    m.equivocate_split.clear();
    if (std::holds_alternative<ByzantineEquivocate>(m.profile)) {
      for (ModuleId x = 0; x < s.n; ++x) {
        if (x != order[i] && rng.below(2) == 0) m.equivocate_split.push_back(x);
      }
    }
  }

  s.network.base_delay = 1;
  s.network.jitter = static_cast<std::uint32_t>(rng.below(2));
  s.network.drop_rate = 0.1 * rng.unit();
  s.network.max_consecutive_drops = 1;
  s.network.partitions.clear();
  s.network.seed = rng.next();
  return s;
}

EpisodeOutcome run_fuzz_episode(const Scenario& base, std::uint64_t campaign_seed, std::uint64_t index,
                                std::uint32_t slots) {
  EpisodeOutcome out;
  out.index = index;
  out.seed = episode_seed(campaign_seed, index);
  const Scenario s = randomize_episode(base, out.seed, slots);
  for (ModuleId m = 0; m < s.n; ++m) {
    if (counts_against_f(s.modules[m].profile)) {
      out.faults += (out.faults.empty() ? "" : " ") + std::to_string(m) + "=" + to_string(s.modules[m].profile);
    }
  }

  const auto result = run_episode(s, RunOptions{EventLog::Mode::kDigestOnly});
  out.decision_digest = result.decision_digest();
  out.event_digest = result.events->fingerprint();
  const std::uint64_t bound = liveness_bound(s.f, s.timeout_rounds);
  for (const auto& r : result.records) {
    if (r.agreement_violation) ++out.agreement_violations;
    out.view_changes.push_back(r.view_changes);
    const std::string where = "frame " + std::to_string(r.frame) + ": ";
    if (r.verdict != VerdictKind::kDecided) {
      out.liveness_failures.push_back(where + "no decision");
      continue;
    }
    out.rounds.push_back(*r.rounds);
    if (*r.rounds > bound) {
      out.liveness_failures.push_back(where + std::to_string(*r.rounds) + " rounds exceeds bound " +
                                      std::to_string(bound));
    }
    if (r.view_changes > s.f + 1) {
      out.liveness_failures.push_back(where + std::to_string(r.view_changes) + " view changes exceeds f+1");
    }
  }
  return out;
}

CampaignReport fuzz_campaign(const Scenario& base, const CampaignOptions& options) {
  const std::uint32_t slots = options.fault_slots.value_or(base.f);
  if (slots > base.f && !base.expects_violation) {
    throw ScenarioError({"campaign with " + std::to_string(slots) + " fault slots exceeds f = " +
                         std::to_string(base.f) + "; the base scenario must set expects_violation = true"});
  }
  const auto problems = validate_scenario(base);
  if (!problems.empty()) throw ScenarioError(problems);

  std::vector<EpisodeOutcome> outcomes(options.episodes);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t i = next++; i < options.episodes; i = next++) {
      outcomes[i] = run_fuzz_episode(base, options.seed, i, slots);
    }
  };
  const std::uint32_t jobs = std::max<std::uint32_t>(1, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::uint32_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  CampaignReport rep;
  rep.scenario = base.name;
  rep.episodes = options.episodes;
  rep.seed = options.seed;
  rep.liveness_bound = liveness_bound(base.f, base.timeout_rounds);
  DigestStream stream;
  for (const auto& o : outcomes) {
    stream.update(o.decision_digest.bytes);
    stream.update(o.event_digest.bytes);
    rep.frames += o.view_changes.size();
    rep.agreement_violations += o.agreement_violations;
    rep.liveness_failures += o.liveness_failures.size();
    for (auto r : o.rounds) {
      ++rep.rounds_histogram[r];
      rep.max_rounds = std::max(rep.max_rounds, r);
    }
    for (auto v : o.view_changes) {
      ++rep.view_change_histogram[v];
      rep.max_view_changes = std::max(rep.max_view_changes, v);
    }
    if (!rep.first_failure && (o.agreement_violations > 0 || !o.liveness_failures.empty())) {
      rep.first_failure = std::pair{o.seed, o.index};
      rep.first_failure_detail = o.agreement_violations > 0 ? "agreement violation" : o.liveness_failures.front();
      rep.first_failure_detail += " [" + o.faults + "]";
    }
  }
  rep.digest = stream.current();
  return rep;
}

std::string CampaignReport::text() const {
  std::ostringstream o;
  o << "campaign " << scenario << " episodes=" << episodes << " seed=" << seed << " frames=" << frames << "\n";
  o << "agreement_violations=" << agreement_violations << " liveness_failures=" << liveness_failures
    << " liveness_bound=" << liveness_bound << "\n";
  o << "max_rounds=" << max_rounds << " max_view_changes=" << max_view_changes << "\n";
  o << "rounds_to_commit:";
  for (const auto& [r, c] : rounds_histogram) o << " " << r << "x" << c;
  o << "\nview_changes:";
  for (const auto& [v, c] : view_change_histogram) o << " " << v << "x" << c;
  o << "\n";
  if (first_failure) {
    o << "first_failure episode=" << first_failure->second << " seed=" << first_failure->first << " "
      << first_failure_detail << "\n";
  }
  o << "digest=" << digest.hex() << "\n";
  o << (passed() ? "PASS" : "FAIL") << "\n";
  return o.str();
}

}  // namespace bftguard
