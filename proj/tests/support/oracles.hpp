// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

// Reference computations written without the library, for cross-checking it.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bftguard::testing {

/// Smallest n whose (n - f)-sized quorums pairwise share at least f + 1
/// members, found by search.
std::uint32_t search_min_replicas(std::uint32_t f);
/// Largest quorum that can still form with f replicas silent.
std::uint32_t search_quorum_size(std::uint32_t f);
/// Smallest reply count guaranteed to include one non-faulty replica.
std::uint32_t search_client_match(std::uint32_t f);

/// Minimum pairwise intersection over all size-q subsets of n, by
/// enumerating bitmasks.
std::uint32_t min_quorum_intersection(std::uint32_t n, std::uint32_t q);

enum class OracleRule { kMajority, kKofN, kUnanimity };

struct OracleVerdict {
  bool decided = false;
  std::string value;
  std::vector<std::uint32_t> supporters;
};

/// Counting voter over one output per module (nullopt = absent).
OracleVerdict brute_force_vote(const std::vector<std::optional<std::string>>& outputs,
                               const std::vector<std::string>& labels, OracleRule rule, std::uint32_t k = 0);

/// Every assignment of {absent} + labels to n modules, in odometer order.
std::vector<std::vector<std::optional<std::string>>> all_assignments(std::uint32_t n,
                                                                     const std::vector<std::string>& labels);

}  // namespace bftguard::testing
