// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include "bftguard/harness/profile.hpp"

#include <charconv>
#include <sstream>

namespace bftguard {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

template <typename T>
T parse_number(const std::string& text, const std::string& what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("bad " + what + " '" + text + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

void validate_profile(const FaultProfile& profile, const DecisionSpace& space) {
  std::visit(Overloaded{
                 [](const DiverseHonest& p) {
                   if (!(p.error_rate >= 0.0 && p.error_rate <= 1.0)) {
                     throw std::invalid_argument("error_rate must lie in [0, 1]");
                   }
                 },
                 [](const Slow& p) {
                   if (p.delay_rounds < 1) throw std::invalid_argument("slow delay must be at least 1 round");
                 },
                 [&](const ByzantineFixed& p) {
                   if (!space.contains(p.bad_label)) {
                     throw std::invalid_argument("byzantine label '" + p.bad_label + "' is not in the decision space");
                   }
                 },
                 [&](const ByzantineEquivocate& p) {
                   if (p.label_a == p.label_b) throw std::invalid_argument("equivocation labels must differ");
                   for (const auto* l : {&p.label_a, &p.label_b}) {
                     if (!space.contains(*l)) {
                       throw std::invalid_argument("equivocation label '" + *l + "' is not in the decision space");
                     }
                   }
                 },
                 [](const auto&) {},
             },
             profile);
}

bool is_byzantine(const FaultProfile& profile) noexcept {
  return std::holds_alternative<ByzantineFixed>(profile) || std::holds_alternative<ByzantineRandom>(profile) ||
         std::holds_alternative<ByzantineEquivocate>(profile);
}

bool counts_against_f(const FaultProfile& profile) noexcept { return !std::holds_alternative<Honest>(profile); }

std::string to_string(const FaultProfile& profile) {
  return std::visit(
      Overloaded{
          [](const Honest&) -> std::string { return "honest"; },
          [](const DiverseHonest& p) -> std::string {
            return "diverse:" + std::to_string(p.perturb_seed) + ":" + format_double(p.error_rate);
          },
          [](const Crash& p) -> std::string { return "crash:" + std::to_string(p.at_frame); },
          [](const Silent&) -> std::string { return "silent"; },
          [](const Slow& p) -> std::string { return "slow:" + std::to_string(p.delay_rounds); },
          [](const ByzantineFixed& p) -> std::string { return "byzantine_fixed:" + p.bad_label; },
          [](const ByzantineRandom& p) -> std::string { return "byzantine_random:" + std::to_string(p.seed); },
          [](const ByzantineEquivocate& p) -> std::string {
            return "byzantine_equivocate:" + p.label_a + ":" + p.label_b;
          },
      },
      profile);
}

FaultProfile parse_profile(const std::string& text) {
  const auto parts = split(text, ':');
  const std::string& kind = parts[0];
  auto want = [&](std::size_t args) {
    if (parts.size() != args + 1) {
      throw std::invalid_argument("profile '" + kind + "' takes " + std::to_string(args) + " argument(s), got '" +
                                  text + "'");
    }
  };
  if (kind == "honest") {
    want(0);
    return Honest{};
  }
  if (kind == "diverse") {
    want(2);
    return DiverseHonest{parse_number<std::uint64_t>(parts[1], "perturb seed"),
                         parse_number<double>(parts[2], "error rate")};
  }
  if (kind == "crash") {
    want(1);
    return Crash{parse_number<Frame>(parts[1], "crash frame")};
  }
  if (kind == "silent") {
    want(0);
    return Silent{};
  }
  if (kind == "slow") {
    want(1);
    return Slow{parse_number<std::uint32_t>(parts[1], "delay")};
  }
  if (kind == "byzantine_fixed") {
    want(1);
    return ByzantineFixed{parts[1]};
  }
  if (kind == "byzantine_random") {
    want(1);
    return ByzantineRandom{parse_number<std::uint64_t>(parts[1], "seed")};
  }
  if (kind == "byzantine_equivocate") {
    want(2);
    return ByzantineEquivocate{parts[1], parts[2]};
  }
  throw std::invalid_argument("unknown profile '" + kind + "'");
}

DecisionValue ObservationTable::observed(const DecisionSpace& space, Frame frame, ModuleId module) const {
  return space.value(rows_.at(frame).observed.at(module));
}

DecisionValue ObservationTable::ground_truth(const DecisionSpace& space, Frame frame) const {
  return space.value(rows_.at(frame).ground_truth);
}

std::vector<std::string> ObservationTable::problems(const DecisionSpace& space, std::uint32_t n) const {
  std::vector<std::string> out;
  if (rows_.empty()) out.push_back("observation table has no frames");
  for (std::size_t f = 0; f < rows_.size(); ++f) {
    const Row& r = rows_[f];
    const std::string where = "frame " + std::to_string(f) + ": ";
    if (r.ground_truth.empty()) {
      out.push_back(where + "missing ground truth");
    } else if (!space.contains(r.ground_truth)) {
      out.push_back(where + "ground truth '" + r.ground_truth + "' is not in the decision space");
    }
    if (r.observed.size() != n) {
      out.push_back(where + "has " + std::to_string(r.observed.size()) + " observations for " + std::to_string(n) +
                    " modules");
    }
    for (const auto& label : r.observed) {
      if (!space.contains(label)) out.push_back(where + "observation '" + label + "' is not in the decision space");
    }
  }
  return out;
}

std::string_view status_name(ModuleStatus s) noexcept {
  switch (s) {
    case ModuleStatus::kActive: return "active";
    case ModuleStatus::kIsolated: return "isolated";
    case ModuleStatus::kRestarting: return "restarting";
  }
  return "unknown";
}

void ModuleState::note_commit(Frame frame) {
  if (!last_committed_ || frame > *last_committed_) last_committed_ = frame;
}

void ModuleState::isolate() {
  if (status_ != ModuleStatus::kActive) {
    throw InvalidTransition("module " + std::to_string(id_) + " is " + std::string(status_name(status_)) +
                            ", only active modules can be isolated");
  }
  status_ = ModuleStatus::kIsolated;
}

void ModuleState::begin_restart(std::optional<FaultProfile> replacement) {
  if (status_ == ModuleStatus::kActive) {
    throw InvalidTransition("module " + std::to_string(id_) + " is active; restart needs isolation first");
  }
  status_ = ModuleStatus::kRestarting;
  last_committed_.reset();
  if (replacement) profile_ = std::move(*replacement);
}

void ModuleState::complete_restart(std::optional<Frame> snapshot_frame) {
  if (status_ != ModuleStatus::kRestarting) {
    throw InvalidTransition("module " + std::to_string(id_) + " is not restarting");
  }
  status_ = ModuleStatus::kActive;
  last_committed_ = snapshot_frame;
}

ModuleState restart_module(ModuleState state) {
  state.begin_restart();
  return state;
}

}  // namespace bftguard
