// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bftguard/quorum/quorum.hpp"

namespace bftguard {

/// 256-bit digest of a canonical byte serialization.
struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  std::string hex() const;
  std::string short_hex() const { return hex().substr(0, 12); }

  friend bool operator==(const Digest&, const Digest&) = default;
  friend auto operator<=>(const Digest&, const Digest&) = default;
};

Digest digest(std::span<const std::uint8_t> payload);
Digest digest(std::string_view text);

/// Incremental digest, used to fingerprint long event logs without keeping
/// them in memory.
class DigestStream {
 public:
  DigestStream();
  ~DigestStream();
  DigestStream(const DigestStream&) = delete;
  DigestStream& operator=(const DigestStream&) = delete;
  DigestStream(DigestStream&&) noexcept;
  DigestStream& operator=(DigestStream&&) noexcept;

  void update(std::span<const std::uint8_t> bytes);
  void update(std::string_view text);
  /// Digest of everything fed so far; the stream stays usable.
  Digest current() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Simulated signature: a keyed tag only the harness registry can mint.
struct AuthTag {
  ModuleId signer = 0;
  Digest payload_digest;
  std::array<std::uint8_t, 32> tag{};

  friend bool operator==(const AuthTag&, const AuthTag&) = default;
};

class UnknownSignerError : public std::out_of_range {
 public:
  explicit UnknownSignerError(ModuleId id)
      : std::out_of_range("module " + std::to_string(id) + " is not registered") {}
};

class Signer;
class Verifier;

/// Per-module secrets, derived from a harness secret. Never handed to
/// modules: they receive a Signer bound to their own id and a Verifier.
class KeyRegistry : public std::enable_shared_from_this<KeyRegistry> {
 public:
  static std::shared_ptr<const KeyRegistry> create(std::uint64_t harness_secret, std::uint32_t module_count);

  std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(keys_.size()); }

  AuthTag sign(ModuleId signer, std::span<const std::uint8_t> payload) const;
  bool verify(const AuthTag& tag, ModuleId claimed_signer, std::span<const std::uint8_t> payload) const;
  bool verify_digest(const AuthTag& tag, ModuleId claimed_signer, const Digest& payload_digest) const;

  Signer signer_for(ModuleId id) const;
  Verifier verifier() const;

 private:
  struct Token {};

 public:
  KeyRegistry(Token, std::vector<std::array<std::uint8_t, 32>> keys);

 private:
  struct MacState;

  std::array<std::uint8_t, 32> mac(ModuleId signer, const Digest& payload_digest) const;

  std::vector<std::array<std::uint8_t, 32>> keys_;
  std::shared_ptr<const MacState> mac_state_;
};

class Signer {
 public:
  ModuleId id() const noexcept { return id_; }
  AuthTag sign(std::span<const std::uint8_t> payload) const { return registry_->sign(id_, payload); }

 private:
  friend class KeyRegistry;
  Signer(std::shared_ptr<const KeyRegistry> registry, ModuleId id) : registry_(std::move(registry)), id_(id) {}

  std::shared_ptr<const KeyRegistry> registry_;
  ModuleId id_;
};

class Verifier {
 public:
  bool verify(const AuthTag& tag, ModuleId claimed_signer, std::span<const std::uint8_t> payload) const {
    return registry_->verify(tag, claimed_signer, payload);
  }
  std::uint32_t module_count() const noexcept { return registry_->size(); }

 private:
  friend class KeyRegistry;
  explicit Verifier(std::shared_ptr<const KeyRegistry> registry) : registry_(std::move(registry)) {}

  std::shared_ptr<const KeyRegistry> registry_;
};

}  // namespace bftguard

template <>
struct std::hash<bftguard::Digest> {
  std::size_t operator()(const bftguard::Digest& d) const noexcept {
    std::size_t h = 0;
    for (std::size_t i = 0; i < sizeof(std::size_t); ++i) h = (h << 8) | d.bytes[i];
    return h;
  }
};
