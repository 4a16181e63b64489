// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include "bftguard/voter/voter.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace bftguard {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct Count {
  std::uint32_t votes = 0;
  std::vector<ModuleId> supporters;
  const DecisionValue* value = nullptr;
};

void check_inputs(std::span<const ModuleOutput> outputs, std::uint32_t n) {
  std::set<ModuleId> seen;
  for (const auto& o : outputs) {
    if (o.module_id >= n) throw VoteInputError("output from module " + std::to_string(o.module_id) + " outside [0, n)");
    if (!seen.insert(o.module_id).second) {
      throw VoteInputError("two outputs from module " + std::to_string(o.module_id));
    }
    if (o.frame != outputs.front().frame) throw VoteInputError("outputs from different frames");
  }
}

std::map<std::string, Count> count(std::span<const ModuleOutput> outputs) {
  std::map<std::string, Count> c;
  for (const auto& o : outputs) {
    auto& e = c[o.value.label()];
    ++e.votes;
    e.supporters.push_back(o.module_id);
    e.value = &o.value;
  }
  for (auto& [label, e] : c) std::sort(e.supporters.begin(), e.supporters.end());
  return c;
}

NoQuorum no_quorum(const std::map<std::string, Count>& c, std::string cause) {
  NoQuorum nq{{}, std::move(cause)};
  for (const auto& [label, e] : c) nq.tallies.emplace(label, e.votes);
  return nq;
}

Verdict decided(const Count& e) { return Decided{*e.value, e.supporters}; }

double parse_fraction(const std::string& text) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("bad weight fraction '" + text + "'");
  }
  return v;
}

}  // namespace

void validate_strategy(const VoteStrategy& strategy, std::uint32_t n) {
  if (const auto* k = std::get_if<KofN>(&strategy); k && (k->k < 1 || k->k > n)) {
    throw std::invalid_argument("k_of_n needs 1 <= k <= n, got k=" + std::to_string(k->k) +
                                " with n=" + std::to_string(n));
  }
  if (const auto* w = std::get_if<Weighted>(&strategy);
      w && !(w->min_weight_fraction > 0.5 && w->min_weight_fraction <= 1.0)) {
    throw std::invalid_argument("weighted fraction must lie in (0.5, 1]");
  }
}

std::string to_string(const VoteStrategy& strategy) {
  return std::visit(Overloaded{
                        [](const Majority&) -> std::string { return "majority"; },
                        [](const KofN& s) -> std::string { return "k_of_n:" + std::to_string(s.k); },
                        [](const Unanimity&) -> std::string { return "unanimity"; },
                        [](const Weighted& s) -> std::string {
                          char buf[64];
                          auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, s.min_weight_fraction);
                          return "weighted:" + std::string(buf, ptr);
                        },
                        [](const FastPathThenMajority&) -> std::string { return "fastpath"; },
                    },
                    strategy);
}

VoteStrategy parse_strategy(const std::string& text) {
  if (text == "majority") return Majority{};
  if (text == "unanimity") return Unanimity{};
  if (text == "fastpath") return FastPathThenMajority{};
  if (text.rfind("k_of_n:", 0) == 0) {
    const std::string arg = text.substr(7);
    std::uint32_t k = 0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), k);
    if (ec != std::errc{} || ptr != arg.data() + arg.size()) throw std::invalid_argument("bad k in '" + text + "'");
    return KofN{k};
  }
  if (text.rfind("weighted:", 0) == 0) return Weighted{parse_fraction(text.substr(9))};
  throw std::invalid_argument("unknown strategy '" + text + "'");
}

Verdict tally(std::span<const ModuleOutput> outputs, const VoteStrategy& strategy, const QuorumConfig& cfg) {
  const std::uint32_t n = cfg.n();
  validate_strategy(strategy, n);
  check_inputs(outputs, n);
  const auto c = count(outputs);

  auto majority = [&]() -> Verdict {
    for (const auto& [label, e] : c) {
      if (2 * e.votes > n) return decided(e);
    }
    return no_quorum(c, "no label reached a majority");
  };

  return std::visit(
      Overloaded{
          [&](const Majority&) { return majority(); },
          [&](const FastPathThenMajority&) { return majority(); },
          [&](const KofN& s) -> Verdict {
            const Count* hit = nullptr;
            std::uint32_t hits = 0;
            for (const auto& [label, e] : c) {
              if (e.votes >= s.k) {
                hit = &e;
                ++hits;
              }
            }
            if (hits == 1) return decided(*hit);
            return no_quorum(c, hits == 0 ? "no label reached k" : "several labels reached k");
          },
          [&](const Unanimity&) -> Verdict {
            if (outputs.size() == n && c.size() == 1) return decided(c.begin()->second);
            return no_quorum(c, outputs.size() == n ? "outputs disagree" : "not every module voted");
          },
          [&](const Weighted& s) { return weighted_tally(outputs, s.min_weight_fraction); },
      },
      strategy);
}

Verdict weighted_tally(std::span<const ModuleOutput> outputs, double min_weight_fraction, double abstain_below) {
  std::set<ModuleId> seen;
  for (const auto& o : outputs) {
    if (!seen.insert(o.module_id).second) {
      throw VoteInputError("two outputs from module " + std::to_string(o.module_id));
    }
    if (!(o.confidence >= 0.0 && o.confidence <= 1.0)) throw VoteInputError("confidence outside [0, 1]");
  }
  std::map<std::string, double> weight;
  std::map<std::string, Count> c;
  double total = 0.0;
  for (const auto& o : outputs) {
    if (o.confidence < abstain_below) continue;
    weight[o.value.label()] += o.confidence;
    auto& e = c[o.value.label()];
    ++e.votes;
    e.supporters.push_back(o.module_id);
    e.value = &o.value;
    total += o.confidence;
  }
  if (total == 0.0) return no_quorum(c, "all-abstained");
  for (auto& [label, e] : c) {
    std::sort(e.supporters.begin(), e.supporters.end());
    if (weight[label] / total > min_weight_fraction) return decided(e);
  }
  return no_quorum(c, "no label carried enough weight");
}

Verdict escalate(Verdict verdict, bool critical, const DecisionSpace& space) {
  if (!critical) return verdict;
  if (const auto* nq = std::get_if<NoQuorum>(&verdict)) return SafeMode{space.safe_default(), nq->cause};
  return verdict;
}

std::optional<Verdict> fast_path_round(std::span<const Announcement> announcements, const QuorumConfig& cfg,
                                       const DecisionSpace& space) {
  std::set<ModuleId> seen;
  std::map<Digest, std::uint32_t> digests;
  for (const auto& a : announcements) {
    if (a.module_id >= cfg.n()) throw VoteInputError("announcement from module outside [0, n)");
    if (!seen.insert(a.module_id).second) throw VoteInputError("two announcements from one module");
    ++digests[a.value_digest];
  }
  const std::uint32_t missing = cfg.n() - static_cast<std::uint32_t>(seen.size());
  if (missing > cfg.f()) {
    NoQuorum nq{{}, "missing announcements beyond f"};
    return nq;
  }
  if (missing != 0 || digests.size() != 1) return std::nullopt;
  // A digest no label hashes to cannot be decided without the full outputs.
  for (std::size_t i = 0; i < space.size(); ++i) {
    DecisionValue v = space.at(i);
    if (value_digest(v) == digests.begin()->first) {
      std::vector<ModuleId> supporters(seen.begin(), seen.end());
      return Decided{v, supporters};
    }
  }
  return std::nullopt;
}

FastPathDecision fast_path_agree(std::span<const Announcement> announcements,
                                 std::span<const ModuleOutput> full_outputs, const QuorumConfig& cfg,
                                 const DecisionSpace& space) {
  if (auto first = fast_path_round(announcements, cfg, space)) return FastPathDecision{std::move(*first), 1};
  return FastPathDecision{tally(full_outputs, Majority{}, cfg), 2};
}

}  // namespace bftguard
