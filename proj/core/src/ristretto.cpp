#include "sbb/ristretto.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>
#include <stdexcept>

#include "sbb/errors.hpp"
#include "sbb/oprf.hpp"

namespace sbb {

namespace {
void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw std::runtime_error("libsodium initialization failed");
}

bool is_zero(const Ristretto255::Scalar& s) {
  return std::all_of(s.begin(), s.end(), [](std::uint8_t b) { return b == 0; });
}
}  // namespace

Ristretto255::Scalar Ristretto255::random_scalar(RandomBits& rng) {
  ensure_sodium();
  Scalar s{};
  do {
    std::array<std::uint8_t, 64> wide{};
    rng.fill(wide);
    crypto_core_ristretto255_scalar_reduce(s.data(), wide.data());
  } while (is_zero(s));
  return s;
}

Ristretto255::Scalar Ristretto255::invert(const Scalar& s) {
  ensure_sodium();
  Scalar out{};
  if (crypto_core_ristretto255_scalar_invert(out.data(), s.data()) != 0)
    throw Error("ristretto: cannot invert zero scalar");
  return out;
}

Ristretto255::Element Ristretto255::hash_to_group(std::span<const std::uint8_t> input) {
  ensure_sodium();
  std::array<std::uint8_t, 64> digest{};
  crypto_hash_sha512(digest.data(), input.data(), input.size());
  Element e{};
  crypto_core_ristretto255_from_hash(e.data(), digest.data());
  return e;
}

Ristretto255::Element Ristretto255::random_element(RandomBits& rng) {
  ensure_sodium();
  std::array<std::uint8_t, 64> wide{};
  rng.fill(wide);
  Element e{};
  crypto_core_ristretto255_from_hash(e.data(), wide.data());
  return e;
}

Ristretto255::Element Ristretto255::pow(const Element& e, const Scalar& s) {
  ensure_sodium();
  Element out{};
  if (crypto_scalarmult_ristretto255(out.data(), s.data(), e.data()) != 0)
    throw Error("ristretto: scalar multiplication rejected (invalid element or identity)");
  return out;
}

bool Ristretto255::valid(const Element& e) {
  ensure_sodium();
  return crypto_core_ristretto255_is_valid_point(e.data()) == 1;
}

Ristretto255::Element Ristretto255::decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != 32) throw ParseError("ristretto: element must be 32 bytes");
  Element e{};
  std::memcpy(e.data(), bytes.data(), 32);
  if (!valid(e)) throw ParseError("ristretto: invalid element encoding");
  return e;
}

OprfOutput oprf_finalize_bytes(std::span<const std::uint8_t> input,
                               std::span<const std::uint8_t> element_encoding) {
  ensure_sodium();
  static constexpr char kTag[] = "sbb/oprf/v1";
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, 32);
  crypto_generichash_update(&st, reinterpret_cast<const unsigned char*>(kTag),
                            sizeof(kTag) - 1);
  const std::uint64_t n = input.size();
  crypto_generichash_update(&st, reinterpret_cast<const unsigned char*>(&n), sizeof n);
  crypto_generichash_update(&st, input.data(), input.size());
  crypto_generichash_update(&st, element_encoding.data(), element_encoding.size());
  OprfOutput out{};
  crypto_generichash_final(&st, out.data(), out.size());
  return out;
}

}  // namespace sbb
