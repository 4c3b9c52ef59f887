#pragma once

#include <cstdint>

#include "sbb/bitvec.hpp"

namespace sbb {

/// Syndrome-based secure sketch over a first-order Reed-Muller code
/// RM(1, m): length n = 2^m, dimension m + 1, minimum distance 2^(m-1).
///
/// Codewords are the evaluation tables of affine Boolean functions on m
/// variables. The parity-check map sends a word to the algebraic normal
/// form coefficients of degree >= 2 (n - m - 1 bits); a word is a codeword
/// exactly when all of them vanish, and the map is linear over GF(2).
///
/// Decoding is bounded-distance: maximum-likelihood search over the coset
/// via a fast Hadamard transform, accepted only when the error estimate has
/// weight <= capacity(). Within that radius the estimate is unique because
/// spheres of radius capacity() around codewords are disjoint.
///
/// m = 8 gives the production [256, 9, 128] code correcting 63 errors;
/// m = 3 gives the toy [8, 4, 4] code used by exhaustive tests.
class SketchCode {
 public:
  static SketchCode reed_muller(std::uint32_t m);

  std::uint32_t length() const { return n_; }          // 2^m
  std::uint32_t dimension() const { return m_ + 1; }
  std::uint32_t syndrome_bits() const { return n_ - m_ - 1; }
  std::uint32_t capacity() const { return (n_ >> 2) - 1; }  // correctable errors

  /// Declared min-entropy parameters of the sketched source. Configuration
  /// metadata only; nothing verifies them.
  double declared_mu = 0.0;
  double declared_mu_prime = 0.0;

  /// The sketch of v: its syndrome under the parity-check map.
  BitVec sketch(const BitVec& v) const;

  struct RecResult {
    BitVec value;  // v' corrected by the decoder's error estimate
    bool ok;       // true iff the estimate has weight <= capacity()
  };

  /// Recover the sketched value from any v' within capacity() of it. Beyond
  /// capacity the result is deterministic but carries no guarantee and is
  /// flagged via ok = false whenever no in-radius estimate exists.
  RecResult recover(const BitVec& sketch, const BitVec& v_prime) const;

 private:
  SketchCode(std::uint32_t m, std::uint32_t n) : m_(m), n_(n) {}
  std::uint32_t m_;
  std::uint32_t n_;
};

}  // namespace sbb
