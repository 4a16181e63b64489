// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <openssl/hmac.h>

#include "bftguard/harness/module.hpp"
#include "bftguard/quorum/codec.hpp"
#include "bftguard/quorum/crypto.hpp"

namespace bftguard {
namespace {

std::vector<std::uint8_t> bytes_of(std::string_view s) { return {s.begin(), s.end()}; }

TEST(DigestTest, KnownAnswer) {
  EXPECT_EQ(digest(std::string_view("abc")).hex(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(digest(std::string_view("")).hex(), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(DigestTest, CanonicalLabelsDiffer) {
  const auto brake = ByteWriter().str("brake").bytes();
  const auto cont = ByteWriter().str("continue").bytes();
  EXPECT_NE(brake, cont);
  EXPECT_NE(digest(brake), digest(cont));
  EXPECT_EQ(digest(brake), digest(ByteWriter().str("brake").bytes()));
}

TEST(DigestTest, ReserializationIsByteIdentical) {
  auto build = [] { return ByteWriter().u32(7).u64(1ull << 40).str("stop").bytes(); };
  EXPECT_EQ(build(), build());
  EXPECT_EQ(digest(build()), digest(build()));
  // Length prefixes keep field boundaries unambiguous.
  EXPECT_NE(ByteWriter().str("ab").str("c").bytes(), ByteWriter().str("a").str("bc").bytes());
}

TEST(DigestTest, StreamMatchesOneShot) {
  DigestStream s;
  s.update(std::string_view("hello "));
  const Digest partial = s.current();
  s.update(std::string_view("world"));
  EXPECT_EQ(partial, digest(std::string_view("hello ")));
  EXPECT_EQ(s.current(), digest(std::string_view("hello world")));
}

TEST(AuthTest, SignVerifyRoundTrip) {
  const auto keys = KeyRegistry::create(42, 4);
  const auto p = bytes_of("payload");
  const AuthTag t = keys->sign(2, p);
  EXPECT_TRUE(keys->verify(t, 2, p));
  EXPECT_FALSE(keys->verify(t, 3, p));
  auto flipped = p;
  flipped[0] ^= 0x01;
  EXPECT_FALSE(keys->verify(t, 2, flipped));
  EXPECT_THROW(keys->sign(4, p), UnknownSignerError);
  EXPECT_THROW(keys->signer_for(9), UnknownSignerError);
}

TEST(AuthTest, TagIsStandardHmacSha256) {
  // Keys are derived from the harness secret as documented in KeyRegistry.
  const std::uint64_t secret = 99;
  const auto keys = KeyRegistry::create(secret, 3);
  const auto p = bytes_of("frame 5");
  const AuthTag t = keys->sign(1, p);

  const Digest key = digest(ByteWriter().str("bftguard/module-key").u64(secret).u32(1).bytes());
  const auto msg = ByteWriter().u32(1).fixed(t.payload_digest.bytes).bytes();
  std::array<std::uint8_t, 32> expected{};
  unsigned int len = 0;
  HMAC(EVP_sha256(), key.bytes.data(), 32, msg.data(), msg.size(), expected.data(), &len);
  EXPECT_EQ(t.tag, expected);
  EXPECT_EQ(t.payload_digest, digest(p));
}

TEST(AuthTest, DifferentHarnessSecretsDoNotCrossVerify) {
  const auto a = KeyRegistry::create(1, 4);
  const auto b = KeyRegistry::create(2, 4);
  const auto p = bytes_of("x");
  EXPECT_FALSE(b->verify(a->sign(0, p), 0, p));
}

// Property: no random tampering of a signed payload or its tag verifies.
TEST(AuthTest, RandomTamperingNeverVerifies) {
  const auto keys = KeyRegistry::create(7, 4);
  ModuleRng rng{2026, 1};
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<std::uint8_t> p(1 + rng.below(64));
    for (auto& b : p) b = static_cast<std::uint8_t>(rng.below(256));
    const auto signer = static_cast<ModuleId>(rng.below(4));
    AuthTag t = keys->sign(signer, p);
    ASSERT_TRUE(keys->verify(t, signer, p));

    auto q = p;
    ModuleId claimed = signer;
    switch (rng.below(5)) {
      case 0: q[rng.below(q.size())] ^= static_cast<std::uint8_t>(1 + rng.below(255)); break;
      case 1: t.tag[rng.below(32)] ^= static_cast<std::uint8_t>(1 + rng.below(255)); break;
      case 2: t.payload_digest.bytes[rng.below(32)] ^= static_cast<std::uint8_t>(1 + rng.below(255)); break;
      case 3:
        claimed = static_cast<ModuleId>((signer + 1 + rng.below(3)) % 4);
        t.signer = claimed;
        break;
      default: q.push_back(static_cast<std::uint8_t>(rng.below(256))); break;
    }
    EXPECT_FALSE(keys->verify(t, claimed, q)) << "trial " << trial;
  }
}

}  // namespace
}  // namespace bftguard
