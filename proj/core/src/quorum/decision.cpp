// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include "bftguard/quorum/decision.hpp"

#include <algorithm>
#include <stdexcept>

namespace bftguard {

DecisionSpace::DecisionSpace(std::vector<std::string> labels, std::string safe_default)
    : labels_(std::move(labels)), safe_default_(std::move(safe_default)) {
  if (labels_.empty()) throw std::invalid_argument("decision space needs at least one label");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].empty()) throw std::invalid_argument("decision labels must be non-empty");
    for (std::size_t j = 0; j < i; ++j) {
      if (labels_[i] == labels_[j]) throw std::invalid_argument("duplicate decision label '" + labels_[i] + "'");
    }
  }
  if (!contains(safe_default_)) {
    throw std::invalid_argument("safe default '" + safe_default_ + "' is not in the decision space");
  }
}

bool DecisionSpace::contains(std::string_view label) const noexcept { return index_of(label).has_value(); }

std::optional<std::size_t> DecisionSpace::index_of(std::string_view label) const noexcept {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

DecisionValue DecisionSpace::value(std::string_view label) const {
  if (!contains(label)) throw std::invalid_argument("label '" + std::string(label) + "' is not in the decision space");
  return DecisionValue(std::string(label));
}

std::optional<DecisionValue> DecisionSpace::try_value(std::string_view label) const {
  if (!contains(label)) return std::nullopt;
  return DecisionValue(std::string(label));
}

}  // namespace bftguard
