#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "sbb/rng.hpp"

namespace sbb {

/// Prime-order group backend for the OPRF: ristretto255 (libsodium).
/// Elements and scalars both encode as 32 bytes.
struct Ristretto255 {
  using Element = std::array<std::uint8_t, 32>;
  using Scalar = std::array<std::uint8_t, 32>;

  static Scalar random_scalar(RandomBits& rng);
  static Scalar invert(const Scalar& s);
  static Element hash_to_group(std::span<const std::uint8_t> input);
  static Element random_element(RandomBits& rng);
  static Element pow(const Element& e, const Scalar& s);  // throws on invalid/identity
  static bool valid(const Element& e);
  static std::array<std::uint8_t, 32> encode(const Element& e) { return e; }
  static Element decode(std::span<const std::uint8_t> bytes);  // throws on invalid
};

}  // namespace sbb
