#include "sbb/bitvec.hpp"

#include <bit>
#include <stdexcept>

#include "sbb/errors.hpp"

namespace sbb {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

BitVec::BitVec(std::uint32_t nbits) : n_(nbits) {
  if (nbits > kMaxBits) throw std::invalid_argument("BitVec: length exceeds 256");
}

std::uint32_t BitVec::popcount() const {
  std::uint32_t c = 0;
  for (auto w : w_) c += static_cast<std::uint32_t>(std::popcount(w));
  return c;
}

BitVec BitVec::operator^(const BitVec& o) const {
  if (n_ != o.n_) throw LengthMismatch("BitVec^: length mismatch");
  BitVec r(n_);
  for (int i = 0; i < 4; ++i) r.w_[i] = w_[i] ^ o.w_[i];
  return r;
}

BitVec BitVec::operator~() const {
  BitVec r(n_);
  for (std::uint32_t i = 0; i < n_; ++i) r.set(i, !get(i));
  return r;
}

bool BitVec::operator<(const BitVec& o) const {
  if (n_ != o.n_) return n_ < o.n_;
  for (int i = 3; i >= 0; --i)
    if (w_[i] != o.w_[i]) return w_[i] < o.w_[i];
  return false;
}

std::string BitVec::to_hex() const {
  if (n_ % 4 != 0) throw std::invalid_argument("to_hex: size not a multiple of 4");
  std::string out(n_ / 4, '0');
  for (std::uint32_t k = 0; k < n_ / 4; ++k) {
    int nib = (get(4 * k) << 3) | (get(4 * k + 1) << 2) | (get(4 * k + 2) << 1) |
              static_cast<int>(get(4 * k + 3));
    out[k] = kHexDigits[nib];
  }
  return out;
}

BitVec BitVec::from_hex(std::string_view hex, std::uint32_t nbits) {
  if (nbits % 4 != 0 || hex.size() != nbits / 4)
    throw ParseError("from_hex: expected " + std::to_string(nbits / 4) + " hex chars");
  BitVec v(nbits);
  for (std::uint32_t k = 0; k < hex.size(); ++k) {
    int nib = hex_value(hex[k]);
    if (nib < 0) throw ParseError("from_hex: invalid hex character");
    v.set(4 * k, (nib >> 3) & 1);
    v.set(4 * k + 1, (nib >> 2) & 1);
    v.set(4 * k + 2, (nib >> 1) & 1);
    v.set(4 * k + 3, nib & 1);
  }
  return v;
}

namespace {
// Storage is LSB-first within words; the serialized form is MSB-first per
// byte. Each output byte is therefore the bit-reversal of a storage byte.
constexpr auto kBitrev = [] {
  std::array<std::uint8_t, 256> t{};
  for (int b = 0; b < 256; ++b) {
    std::uint8_t r = 0;
    for (int i = 0; i < 8; ++i)
      if (b & (1 << i)) r |= static_cast<std::uint8_t>(0x80 >> i);
    t[static_cast<std::size_t>(b)] = r;
  }
  return t;
}();
}  // namespace

std::vector<std::uint8_t> BitVec::to_bytes() const {
  std::vector<std::uint8_t> out((n_ + 7) / 8, 0);
  for (std::uint32_t k = 0; k < out.size(); ++k)
    out[k] = kBitrev[(w_[k >> 3] >> (8 * (k & 7))) & 0xff];
  return out;
}

BitVec BitVec::from_bytes(std::span<const std::uint8_t> bytes, std::uint32_t nbits) {
  if (bytes.size() != (nbits + 7) / 8) throw ParseError("from_bytes: wrong byte count");
  BitVec v(nbits);
  for (std::uint32_t k = 0; k < bytes.size(); ++k)
    v.w_[k >> 3] |= static_cast<std::uint64_t>(kBitrev[bytes[k]]) << (8 * (k & 7));
  if (nbits % 64 != 0) {
    // Clear any padding bits that leaked past the declared length.
    const std::uint32_t top = nbits >> 6;
    v.w_[top] &= (std::uint64_t{1} << (nbits & 63)) - 1;
  }
  return v;
}

BitVec BitVec::random(std::uint32_t nbits, RandomBits& rng) {
  BitVec v(nbits);
  for (std::uint32_t k = 0; k * 64 < nbits; ++k) {
    std::uint64_t w = rng.next_u64();
    if (nbits - k * 64 < 64) w &= (std::uint64_t{1} << (nbits - k * 64)) - 1;
    v.w_[k] = w;
  }
  return v;
}

std::uint32_t hamming(const BitVec& a, const BitVec& b) {
  if (a.size() != b.size()) throw LengthMismatch("hamming: length mismatch");
  std::uint32_t c = 0;
  auto wa = a.words(), wb = b.words();
  for (int i = 0; i < 4; ++i) c += static_cast<std::uint32_t>(std::popcount(wa[i] ^ wb[i]));
  return c;
}

bool t_similar(const BitVec& a, const BitVec& b, std::uint32_t T) {
  return hamming(a, b) < T;
}

std::size_t BitVecHash::operator()(const BitVec& v) const {
  // FNV-1a over the words plus the length.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  mix(v.size());
  for (auto w : v.words()) mix(w);
  return static_cast<std::size_t>(h);
}

}  // namespace sbb
