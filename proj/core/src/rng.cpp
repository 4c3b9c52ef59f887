#include "sbb/rng.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>

namespace sbb {

namespace {
void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw std::runtime_error("libsodium initialization failed");
}
}  // namespace

std::uint64_t RandomBits::uniform_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be nonzero");
  // Rejection sampling; unbiased and portable across platforms.
  const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

bool RandomBits::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return unit() < p;
}

double RandomBits::unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

void RandomBits::fill(std::span<std::uint8_t> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    std::uint64_t x = next_u64();
    for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
      out[i] = static_cast<std::uint8_t>(x >> (8 * b));
    }
  }
}

std::uint64_t SystemRng::next_u64() {
  ensure_sodium();
  std::uint64_t x;
  randombytes_buf(&x, sizeof x);
  return x;
}

PrfRng::PrfRng(std::span<const std::uint8_t> key, std::span<const std::uint8_t> input) {
  ensure_sodium();
  crypto_generichash(key_.data(), key_.size(), input.data(), input.size(),
                     key.data(), key.size());
}

PrfRng::~PrfRng() { sodium_memzero(key_.data(), key_.size()); }

void PrfRng::refill() {
  std::array<std::uint8_t, 8> nonce{};
  std::memcpy(nonce.data(), &counter_, sizeof counter_);
  ++counter_;
  block_.fill(0);
  crypto_stream_chacha20_xor(block_.data(), block_.data(), block_.size(),
                             nonce.data(), key_.data());
  pos_ = 0;
}

std::uint64_t PrfRng::next_u64() {
  if (pos_ + 8 > block_.size()) refill();
  std::uint64_t x;
  std::memcpy(&x, block_.data() + pos_, 8);
  pos_ += 8;
  return x;
}

std::array<std::uint8_t, 32> derive_key(std::uint64_t master, std::string_view label) {
  ensure_sodium();
  std::array<std::uint8_t, 8> key{};
  std::memcpy(key.data(), &master, sizeof master);
  std::array<std::uint8_t, 32> out{};
  crypto_generichash(out.data(), out.size(),
                     reinterpret_cast<const unsigned char*>(label.data()), label.size(),
                     key.data(), key.size());
  return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  const auto key = derive_key(master, label);
  std::uint64_t x;
  std::memcpy(&x, key.data(), sizeof x);
  return x;
}

}  // namespace sbb
