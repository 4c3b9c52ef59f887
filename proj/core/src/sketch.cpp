#include "sbb/sketch.hpp"

#include <array>
#include <bit>
#include <cstdlib>
#include <stdexcept>

#include "sbb/errors.hpp"

namespace sbb {

namespace {

// In-place Moebius transform: a[S] <- xor of a[x] over x subset of S.
// The transform is an involution, so it also evaluates a coefficient table
// back into a truth table.
void moebius(std::array<std::uint8_t, 256>& a, std::uint32_t n) {
  for (std::uint32_t bit = 1; bit < n; bit <<= 1)
    for (std::uint32_t s = 0; s < n; ++s)
      if (s & bit) a[s] ^= a[s ^ bit];
}

}  // namespace

SketchCode SketchCode::reed_muller(std::uint32_t m) {
  if (m < 2 || m > 8) throw std::invalid_argument("reed_muller: need 2 <= m <= 8");
  return SketchCode(m, std::uint32_t{1} << m);
}

BitVec SketchCode::sketch(const BitVec& v) const {
  if (v.size() != n_) throw LengthMismatch("sketch: word length does not match code");
  std::array<std::uint8_t, 256> f{};
  for (std::uint32_t x = 0; x < n_; ++x) f[x] = v.get(x);
  moebius(f, n_);
  // Keep the coefficients of monomials with at least two variables.
  BitVec syn(syndrome_bits());
  std::uint32_t out = 0;
  for (std::uint32_t s = 0; s < n_; ++s)
    if (std::popcount(s) >= 2) syn.set(out++, f[s]);
  return syn;
}

SketchCode::RecResult SketchCode::recover(const BitVec& z, const BitVec& v_prime) const {
  if (z.size() != syndrome_bits()) throw LengthMismatch("recover: sketch length mismatch");
  if (v_prime.size() != n_) throw LengthMismatch("recover: word length mismatch");

  // Syndrome of the unknown error pattern e = v xor v'.
  const BitVec s_err = sketch(v_prime) ^ z;

  // A coset representative y with that syndrome: the polynomial whose
  // degree >= 2 coefficients equal the syndrome, evaluated to a table.
  std::array<std::uint8_t, 256> y{};
  std::uint32_t in = 0;
  for (std::uint32_t s = 0; s < n_; ++s)
    if (std::popcount(s) >= 2) y[s] = s_err.get(in++);
  moebius(y, n_);

  // Maximum-likelihood decode of y over RM(1, m) via the Hadamard
  // transform: W[j] = sum over x of (-1)^(y(x) xor <j, x>).
  std::array<std::int32_t, 256> w{};
  for (std::uint32_t x = 0; x < n_; ++x) w[x] = y[x] ? -1 : 1;
  for (std::uint32_t bit = 1; bit < n_; bit <<= 1)
    for (std::uint32_t s = 0; s < n_; ++s)
      if ((s & bit) == 0) {
        const std::int32_t a = w[s], b = w[s ^ bit];
        w[s] = a + b;
        w[s ^ bit] = a - b;
      }
  std::uint32_t best = 0;
  for (std::uint32_t j = 1; j < n_; ++j)
    if (std::abs(w[j]) > std::abs(w[best])) best = j;
  const bool complement = w[best] < 0;

  // Error estimate: y minus the winning affine function.
  BitVec e_hat(n_);
  for (std::uint32_t x = 0; x < n_; ++x) {
    const bool c = (std::popcount(x & best) & 1) ^ static_cast<int>(complement);
    if (static_cast<bool>(y[x]) != c) e_hat.set(x, true);
  }
  RecResult r{v_prime ^ e_hat, e_hat.popcount() <= capacity()};
  return r;
}

}  // namespace sbb
