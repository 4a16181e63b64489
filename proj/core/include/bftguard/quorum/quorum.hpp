// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace bftguard {

using ModuleId = std::uint32_t;
using Frame = std::uint64_t;
using Round = std::uint64_t;
using ViewNumber = std::uint64_t;

/// Network endpoint. Replicas use their ModuleId; the observer and the
/// input dispatcher get reserved ids above any replica.
using NodeId = std::uint32_t;
inline constexpr NodeId kObserverNode = 0xFFFF'FFF0u;
inline constexpr NodeId kEnvironmentNode = 0xFFFF'FFF1u;

/// Replicas needed to tolerate `f` arbitrary faults.
constexpr std::uint32_t min_replicas(std::uint32_t f) noexcept { return 3 * f + 1; }

/// Votes needed to prepare or commit.
constexpr std::uint32_t quorum_size(std::uint32_t f) noexcept { return 2 * f + 1; }

/// Matching replies an external observer waits for before treating a
/// decision as final.
constexpr std::uint32_t client_match(std::uint32_t f) noexcept { return f + 1; }

/// (n, f) arithmetic of one ensemble. Construction enforces n >= 3f + 1.
class QuorumConfig {
 public:
  QuorumConfig(std::uint32_t n, std::uint32_t f) : n_(n), f_(f) {
    if (n == 0) throw std::invalid_argument("replica count must be positive");
    if (n < min_replicas(f)) {
      throw std::invalid_argument("n < 3f+1: " + std::to_string(n) + " replicas cannot tolerate f=" +
                                  std::to_string(f));
    }
  }

  /// Largest f that `n` replicas tolerate.
  static QuorumConfig for_replicas(std::uint32_t n) { return QuorumConfig(n, n == 0 ? 0 : (n - 1) / 3); }

  std::uint32_t n() const noexcept { return n_; }
  std::uint32_t f() const noexcept { return f_; }
  std::uint32_t quorum() const noexcept { return quorum_size(f_); }
  std::uint32_t reply_match() const noexcept { return client_match(f_); }

  /// How many replicas may be taken out of service while a quorum can
  /// still form.
  std::uint32_t isolation_budget() const noexcept { return n_ - quorum_size(f_); }

  friend bool operator==(const QuorumConfig&, const QuorumConfig&) = default;

 private:
  std::uint32_t n_;
  std::uint32_t f_;
};

}  // namespace bftguard
