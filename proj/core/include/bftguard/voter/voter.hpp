// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bftguard/quorum/decision.hpp"
#include "bftguard/quorum/messages.hpp"
#include "bftguard/quorum/quorum.hpp"

namespace bftguard {

struct Majority {
  friend bool operator==(const Majority&, const Majority&) = default;
};
struct KofN {
  std::uint32_t k = 1;
  friend bool operator==(const KofN&, const KofN&) = default;
};
struct Unanimity {
  friend bool operator==(const Unanimity&, const Unanimity&) = default;
};
struct Weighted {
  double min_weight_fraction = 0.5;
  friend bool operator==(const Weighted&, const Weighted&) = default;
};
struct FastPathThenMajority {
  friend bool operator==(const FastPathThenMajority&, const FastPathThenMajority&) = default;
};

using VoteStrategy = std::variant<Majority, KofN, Unanimity, Weighted, FastPathThenMajority>;

/// Confidence below which a weighted vote counts as an abstention.
inline constexpr double kDefaultAbstainBelow = 0.05;

/// Throws std::invalid_argument unless 1 <= k <= n and the weighted fraction
/// lies in (0.5, 1].
void validate_strategy(const VoteStrategy& strategy, std::uint32_t n);

/// "majority", "k_of_n:<k>", "unanimity", "weighted:<fraction>", "fastpath".
std::string to_string(const VoteStrategy& strategy);
VoteStrategy parse_strategy(const std::string& text);

struct Decided {
  DecisionValue value;
  std::vector<ModuleId> supporters;  // ascending
};

struct NoQuorum {
  std::map<std::string, std::uint32_t> tallies;
  std::string cause;
};

struct SafeMode {
  DecisionValue value;
  std::string cause;
};

using Verdict = std::variant<Decided, NoQuorum, SafeMode>;

/// Duplicate module ids, ids outside [0, n), or mixed frames.
class VoteInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Combines verified outputs of one frame. Absent modules count as no vote.
/// FastPathThenMajority tallies full outputs as Majority.
Verdict tally(std::span<const ModuleOutput> outputs, const VoteStrategy& strategy, const QuorumConfig& cfg);

Verdict weighted_tally(std::span<const ModuleOutput> outputs, double min_weight_fraction,
                       double abstain_below = kDefaultAbstainBelow);

/// NoQuorum on an action-critical frame becomes SafeMode(safe_default).
Verdict escalate(Verdict verdict, bool critical, const DecisionSpace& space);

/// Outcome of the announcement round: decided when all n modules announced
/// one digest, NoQuorum when more than f announcements are missing, nullopt
/// when full outputs are needed.
std::optional<Verdict> fast_path_round(std::span<const Announcement> announcements, const QuorumConfig& cfg,
                                       const DecisionSpace& space);

struct FastPathDecision {
  Verdict verdict;
  std::uint32_t rounds_used = 0;
};

/// Both rounds at once, for callers holding every message already.
FastPathDecision fast_path_agree(std::span<const Announcement> announcements,
                                 std::span<const ModuleOutput> full_outputs, const QuorumConfig& cfg,
                                 const DecisionSpace& space);

}  // namespace bftguard
