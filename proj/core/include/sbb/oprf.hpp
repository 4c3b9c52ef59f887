#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "sbb/rng.hpp"

namespace sbb {

/// 32-byte PRF output H'(p, H(p)^K).
using OprfOutput = std::array<std::uint8_t, 32>;

/// Blinded-exponentiation OPRF over a prime-order group G. The group type
/// supplies:
///
///   using Element;  using Scalar;
///   static Scalar random_scalar(RandomBits&);          // uniform nonzero
///   static Scalar invert(const Scalar&);
///   static Element hash_to_group(span<const uint8_t>);
///   static Element random_element(RandomBits&);
///   static Element pow(const Element&, const Scalar&); // throws on invalid
///   static bool valid(const Element&);
///   static std::array<uint8_t,32> encode(const Element&);
///   static Element decode(span<const uint8_t>);        // throws on invalid
///
/// The production group is Ristretto255 (ristretto.hpp); tests additionally
/// instantiate a small Schnorr subgroup where group-law oracles and
/// uniformity statistics are feasible.
template <class G>
typename G::Element oprf_blind(std::span<const std::uint8_t> input,
                               const typename G::Scalar& tau) {
  return G::pow(G::hash_to_group(input), tau);
}

template <class G>
typename G::Element oprf_evaluate(const typename G::Element& x,
                                  const typename G::Scalar& k) {
  return G::pow(x, k);
}

template <class G>
typename G::Element oprf_unblind(const typename G::Element& y,
                                 const typename G::Scalar& tau) {
  return G::pow(y, G::invert(tau));
}

/// H'(p, Y): BLAKE2b over a domain tag, the PRF input, and the encoded
/// unblinded element.
OprfOutput oprf_finalize_bytes(std::span<const std::uint8_t> input,
                               std::span<const std::uint8_t> element_encoding);

template <class G>
OprfOutput oprf_finalize(std::span<const std::uint8_t> input,
                         const typename G::Element& y_unblinded) {
  const auto enc = G::encode(y_unblinded);
  return oprf_finalize_bytes(input, enc);
}

/// Single-party evaluation F_K(p); what the server precomputes per bucket
/// member, and the oracle the interactive path must agree with.
template <class G>
OprfOutput oprf_direct(std::span<const std::uint8_t> input, const typename G::Scalar& k) {
  return oprf_finalize<G>(input, G::pow(G::hash_to_group(input), k));
}

}  // namespace sbb
