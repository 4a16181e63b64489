// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace bftguard {

/// Canonical serialization: fields in declared order, integers fixed-width
/// big-endian, text and nested blobs prefixed with a u32 length.
class ByteWriter {
 public:
  ByteWriter& u8(std::uint8_t v) {
    buf_.push_back(v);
    return *this;
  }
  ByteWriter& u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
  }
  ByteWriter& u64(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
  }
  ByteWriter& f64(double v) { return u64(std::bit_cast<std::uint64_t>(v)); }
  ByteWriter& boolean(bool v) { return u8(v ? 1 : 0); }
  ByteWriter& str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
    return *this;
  }
  ByteWriter& blob(std::span<const std::uint8_t> b) {
    u32(static_cast<std::uint32_t>(b.size()));
    buf_.insert(buf_.end(), b.begin(), b.end());
    return *this;
  }
  template <std::size_t N>
  ByteWriter& fixed(const std::array<std::uint8_t, N>& b) {
    buf_.insert(buf_.end(), b.begin(), b.end());
    return *this;
  }

  const std::vector<std::uint8_t>& bytes() const& noexcept { return buf_; }
  std::vector<std::uint8_t> bytes() && noexcept { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

}  // namespace bftguard
