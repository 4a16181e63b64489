// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bftguard {

class DecisionSpace;

/// One label of a DecisionSpace. Only a DecisionSpace can mint values, so
/// every DecisionValue in the system was validated against some space.
class DecisionValue {
 public:
  const std::string& label() const noexcept { return label_; }

  friend bool operator==(const DecisionValue&, const DecisionValue&) = default;
  friend auto operator<=>(const DecisionValue&, const DecisionValue&) = default;

 private:
  friend class DecisionSpace;
  explicit DecisionValue(std::string label) : label_(std::move(label)) {}

  std::string label_;
};

/// Finite, ordered set of action labels plus the safe-mode fallback.
class DecisionSpace {
 public:
  DecisionSpace(std::vector<std::string> labels, std::string safe_default);

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }

  bool contains(std::string_view label) const noexcept;
  bool contains(const DecisionValue& v) const noexcept { return contains(v.label()); }

  std::optional<std::size_t> index_of(std::string_view label) const noexcept;

  /// Throws std::invalid_argument for labels outside the space.
  DecisionValue value(std::string_view label) const;
  std::optional<DecisionValue> try_value(std::string_view label) const;
  DecisionValue at(std::size_t index) const { return DecisionValue(labels_.at(index)); }

  DecisionValue safe_default() const { return DecisionValue(safe_default_); }

  friend bool operator==(const DecisionSpace&, const DecisionSpace&) = default;

 private:
  std::vector<std::string> labels_;
  std::string safe_default_;
};

}  // namespace bftguard
