// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include "bftguard/harness/module.hpp"

#include <limits>

namespace bftguard {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<std::uint32_t> seed_words(std::initializer_list<std::uint64_t> words) {
  std::vector<std::uint32_t> out;
  for (std::uint64_t w : words) {
    out.push_back(static_cast<std::uint32_t>(w));
    out.push_back(static_cast<std::uint32_t>(w >> 32));
  }
  return out;
}

std::uint64_t profile_seed(const FaultProfile& p) {
  if (const auto* d = std::get_if<DiverseHonest>(&p)) return d->perturb_seed;
  if (const auto* r = std::get_if<ByzantineRandom>(&p)) return r->seed;
  return 0;
}

}  // namespace

ModuleRng::ModuleRng(std::initializer_list<std::uint64_t> words) {
  auto w = seed_words(words);
  std::seed_seq seq(w.begin(), w.end());
  engine_.seed(seq);
}

std::uint64_t ModuleRng::below(std::uint64_t bound) {
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double ModuleRng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double confidence_of(const ModuleConfig& cfg) noexcept {
  return is_byzantine(cfg.profile) ? cfg.adversary_confidence : cfg.base_confidence;
}

DecisionModule::DecisionModule(ModuleId id, ModuleConfig cfg, Signer signer,
                               std::shared_ptr<const DecisionSpace> space, std::uint64_t scenario_seed)
    : cfg_(std::move(cfg)), signer_(std::move(signer)), space_(std::move(space)), scenario_seed_(scenario_seed),
      state_(id, cfg_.profile) {
  if (signer_.id() != id) throw std::invalid_argument("signer bound to a different module");
  validate_profile(cfg_.profile, *space_);
  for (double c : {cfg_.base_confidence, cfg_.adversary_confidence}) {
    if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("confidence must lie in [0, 1]");
  }
}

Production DecisionModule::produce_output(Frame frame, const DecisionValue& observation) const {
  if (!space_->contains(observation.label())) {
    throw std::invalid_argument("observation '" + observation.label() + "' is not in the decision space");
  }
  if (state_.status() != ModuleStatus::kActive) {
    throw InvalidTransition("module " + std::to_string(id()) + " is not active");
  }
  const FaultProfile& profile = state_.profile();
  ModuleRng rng{scenario_seed_, id(), profile_seed(profile), frame};
  ModuleConfig effective = cfg_;
  effective.profile = profile;
  const double confidence = confidence_of(effective);
  auto emit = [&](const DecisionValue& v) -> Production { return make_output(signer_, frame, v, confidence); };

  return std::visit(
      Overloaded{
          [&](const Honest&) { return emit(observation); },
          [&](const DiverseHonest& p) {
            if (space_->size() < 2 || rng.unit() >= p.error_rate) return emit(observation);
            // Uniform over the labels other than the observation.
            std::size_t pick = rng.below(space_->size() - 1);
            if (pick >= *space_->index_of(observation.label())) ++pick;
            return emit(space_->at(pick));
          },
          [&](const Crash& p) -> Production {
            if (frame >= p.at_frame) return NoOutput{};
            return emit(observation);
          },
          [&](const Silent&) -> Production { return NoOutput{}; },
          [&](const Slow&) { return emit(observation); },
          [&](const ByzantineFixed& p) { return emit(space_->value(p.bad_label)); },
          [&](const ByzantineRandom&) { return emit(space_->at(rng.below(space_->size()))); },
          [&](const ByzantineEquivocate& p) -> Production {
            return EquivocatedOutputs{make_output(signer_, frame, space_->value(p.label_a), confidence),
                                      make_output(signer_, frame, space_->value(p.label_b), confidence)};
          },
      },
      profile);
}

void DecisionModule::restart() {
  if (cfg_.on_restart == RestartPolicy::kHonest) {
    state_.begin_restart(FaultProfile{Honest{}});
  } else {
    state_.begin_restart();
  }
}

}  // namespace bftguard
