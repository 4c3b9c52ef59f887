#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbb/rng.hpp"

namespace sbb {

/// Fixed-length bit vector, at most 256 bits. Similarity hashes (256-bit),
/// coarse PDQ hashes (16-bit), coarse embeddings (d-bit) and syndromes all
/// use this one type; operations on two vectors require equal lengths.
///
/// Bit 0 is the most significant bit of the serialized form: the first hex
/// nibble holds bits 0..3 and packed byte 0 holds bits 0..7, MSB first. For
/// a 256-bit hash, bit index 16*i + j is DCT slot (i, j), so the leading
/// hex character carries slot (0,0).
class BitVec {
 public:
  static constexpr std::uint32_t kMaxBits = 256;

  BitVec() = default;
  explicit BitVec(std::uint32_t nbits);

  std::uint32_t size() const { return n_; }
  bool empty() const { return n_ == 0; }

  bool get(std::uint32_t i) const {
    return (w_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::uint32_t i, bool v) {
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    if (v)
      w_[i >> 6] |= m;
    else
      w_[i >> 6] &= ~m;
  }
  void toggle(std::uint32_t i) { w_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  std::uint32_t popcount() const;

  BitVec operator^(const BitVec& o) const;
  BitVec operator~() const;
  bool operator==(const BitVec& o) const = default;

  std::span<const std::uint64_t, 4> words() const { return w_; }

  std::string to_hex() const;  // size()/4 lowercase hex chars; size() % 4 == 0
  static BitVec from_hex(std::string_view hex, std::uint32_t nbits = 256);

  std::vector<std::uint8_t> to_bytes() const;  // ceil(size/8) bytes, MSB-first
  static BitVec from_bytes(std::span<const std::uint8_t> bytes, std::uint32_t nbits);

  static BitVec random(std::uint32_t nbits, RandomBits& rng);

  /// Strict weak order so BitVec can key ordered containers.
  bool operator<(const BitVec& o) const;

 private:
  std::uint32_t n_ = 0;
  std::array<std::uint64_t, 4> w_{};
};

/// Number of differing positions. Throws LengthMismatch on unequal sizes.
std::uint32_t hamming(const BitVec& a, const BitVec& b);

/// The similarity predicate: distance strictly smaller than T.
bool t_similar(const BitVec& a, const BitVec& b, std::uint32_t T);

struct BitVecHash {
  std::size_t operator()(const BitVec& v) const;
};

}  // namespace sbb
