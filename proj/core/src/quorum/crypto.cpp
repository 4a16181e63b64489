// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include "bftguard/quorum/crypto.hpp"

#include <algorithm>

#include <openssl/crypto.h>
#include <openssl/evp.h>

#include "bftguard/quorum/codec.hpp"

namespace bftguard {

std::string Digest::hex() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0x0F]);
  }
  return out;
}

namespace {

// Fetched once: the one-shot SHA256() entry point looks the algorithm up
// again on every call.
const EVP_MD* sha256() {
  static EVP_MD* md = EVP_MD_fetch(nullptr, "SHA256", nullptr);
  return md;
}

struct CtxFree {
  void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
using Ctx = std::unique_ptr<EVP_MD_CTX, CtxFree>;

}  // namespace

Digest digest(std::span<const std::uint8_t> payload) {
  thread_local Ctx ctx(EVP_MD_CTX_new());
  Digest d;
  unsigned int len = 0;
  if (EVP_DigestInit_ex(ctx.get(), sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), payload.data(), payload.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), d.bytes.data(), &len) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  return d;
}

Digest digest(std::string_view text) {
  return digest(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

struct DigestStream::Impl {
  EVP_MD_CTX* ctx = nullptr;
  ~Impl() { EVP_MD_CTX_free(ctx); }
};

DigestStream::DigestStream() : impl_(std::make_unique<Impl>()) {
  impl_->ctx = EVP_MD_CTX_new();
  if (impl_->ctx == nullptr || EVP_DigestInit_ex(impl_->ctx, sha256(), nullptr) != 1) {
    throw std::runtime_error("EVP_DigestInit_ex failed");
  }
}

DigestStream::~DigestStream() = default;
DigestStream::DigestStream(DigestStream&&) noexcept = default;
DigestStream& DigestStream::operator=(DigestStream&&) noexcept = default;

void DigestStream::update(std::span<const std::uint8_t> bytes) {
  EVP_DigestUpdate(impl_->ctx, bytes.data(), bytes.size());
}

void DigestStream::update(std::string_view text) { EVP_DigestUpdate(impl_->ctx, text.data(), text.size()); }

Digest DigestStream::current() const {
  EVP_MD_CTX* copy = EVP_MD_CTX_new();
  EVP_MD_CTX_copy_ex(copy, impl_->ctx);
  Digest d;
  unsigned int len = 0;
  EVP_DigestFinal_ex(copy, d.bytes.data(), &len);
  EVP_MD_CTX_free(copy);
  return d;
}

std::shared_ptr<const KeyRegistry> KeyRegistry::create(std::uint64_t harness_secret, std::uint32_t module_count) {
  std::vector<std::array<std::uint8_t, 32>> keys;
  keys.reserve(module_count);
  for (std::uint32_t i = 0; i < module_count; ++i) {
    ByteWriter w;
    w.str("bftguard/module-key").u64(harness_secret).u32(i);
    keys.push_back(digest(w.bytes()).bytes);
  }
  return std::make_shared<const KeyRegistry>(Token{}, std::move(keys));
}

// HMAC-SHA256 with the keyed inner and outer hash states computed once per
// key; every tag then costs two context copies instead of a full setup.
struct KeyRegistry::MacState {
  std::vector<std::pair<Ctx, Ctx>> keyed;  // (inner, outer) per module

  static Ctx keyed_ctx(const std::array<std::uint8_t, 32>& key, std::uint8_t pad) {
    std::array<std::uint8_t, 64> block{};
    for (std::size_t i = 0; i < block.size(); ++i) block[i] = (i < key.size() ? key[i] : 0) ^ pad;
    Ctx ctx(EVP_MD_CTX_new());
    if (!ctx || EVP_DigestInit_ex(ctx.get(), sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), block.data(), block.size()) != 1) {
      throw std::runtime_error("EVP_DigestInit_ex failed");
    }
    return ctx;
  }
};

KeyRegistry::KeyRegistry(Token, std::vector<std::array<std::uint8_t, 32>> keys) : keys_(std::move(keys)) {
  auto state = std::make_shared<MacState>();
  for (const auto& key : keys_) {
    state->keyed.emplace_back(MacState::keyed_ctx(key, 0x36), MacState::keyed_ctx(key, 0x5c));
  }
  mac_state_ = std::move(state);
}

std::array<std::uint8_t, 32> KeyRegistry::mac(ModuleId signer, const Digest& payload_digest) const {
  std::array<std::uint8_t, 36> msg{};
  for (int i = 0; i < 4; ++i) msg[i] = static_cast<std::uint8_t>(signer >> (24 - 8 * i));
  std::copy(payload_digest.bytes.begin(), payload_digest.bytes.end(), msg.begin() + 4);

  thread_local Ctx work(EVP_MD_CTX_new());
  const auto& [inner, outer] = mac_state_->keyed[signer];
  std::array<std::uint8_t, 32> inner_hash{};
  std::array<std::uint8_t, 32> out{};
  unsigned int len = 0;
  EVP_MD_CTX_copy_ex(work.get(), inner.get());
  EVP_DigestUpdate(work.get(), msg.data(), msg.size());
  EVP_DigestFinal_ex(work.get(), inner_hash.data(), &len);
  EVP_MD_CTX_copy_ex(work.get(), outer.get());
  EVP_DigestUpdate(work.get(), inner_hash.data(), inner_hash.size());
  EVP_DigestFinal_ex(work.get(), out.data(), &len);
  return out;
}

AuthTag KeyRegistry::sign(ModuleId signer, std::span<const std::uint8_t> payload) const {
  if (signer >= keys_.size()) throw UnknownSignerError(signer);
  AuthTag t;
  t.signer = signer;
  t.payload_digest = digest(payload);
  t.tag = mac(signer, t.payload_digest);
  return t;
}

bool KeyRegistry::verify(const AuthTag& tag, ModuleId claimed_signer, std::span<const std::uint8_t> payload) const {
  return verify_digest(tag, claimed_signer, digest(payload));
}

bool KeyRegistry::verify_digest(const AuthTag& tag, ModuleId claimed_signer, const Digest& payload_digest) const {
  if (tag.signer != claimed_signer || claimed_signer >= keys_.size()) return false;
  if (tag.payload_digest != payload_digest) return false;
  auto expected = mac(claimed_signer, payload_digest);
  return CRYPTO_memcmp(expected.data(), tag.tag.data(), expected.size()) == 0;
}

Signer KeyRegistry::signer_for(ModuleId id) const {
  if (id >= keys_.size()) throw UnknownSignerError(id);
  return Signer(shared_from_this(), id);
}

Verifier KeyRegistry::verifier() const { return Verifier(shared_from_this()); }

}  // namespace bftguard
