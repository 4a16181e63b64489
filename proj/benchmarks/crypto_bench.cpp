// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "bftguard/quorum/crypto.hpp"

namespace bftguard {
namespace {

void BM_Digest(benchmark::State& state) {
  const std::vector<std::uint8_t> payload(static_cast<std::size_t>(state.range(0)), 0x5a);
  for (auto _ : state) benchmark::DoNotOptimize(digest(payload));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_Digest)->Arg(64)->Arg(1024);

void BM_SignVerify(benchmark::State& state) {
  const auto keys = KeyRegistry::create(3, 4);
  const Signer signer = keys->signer_for(2);
  const Verifier verifier = keys->verifier();
  const std::vector<std::uint8_t> payload(96, 0x11);
  for (auto _ : state) {
    const AuthTag tag = signer.sign(payload);
    benchmark::DoNotOptimize(verifier.verify(tag, 2, payload));
  }
}
BENCHMARK(BM_SignVerify);

}  // namespace
}  // namespace bftguard
