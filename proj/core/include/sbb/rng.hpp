#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string_view>

namespace sbb {

/// Source of random bits. Protocol and simulation code draws all randomness
/// through this interface so that callers choose between reproducible seeded
/// streams, OS randomness, and PRF-derived coins.
class RandomBits {
 public:
  virtual ~RandomBits() = default;
  virtual std::uint64_t next_u64() = 0;

  /// Uniform in [0, n). n must be nonzero.
  std::uint64_t uniform_below(std::uint64_t n);

  /// True with probability p, p in [0, 1].
  bool bernoulli(double p);

  /// Uniform double in [0, 1).
  double unit();

  void fill(std::span<std::uint8_t> out);
};

/// Reproducible stream for simulations. The engine output sequence is
/// fully specified by the standard, so seeded runs are portable.
class SeededRng final : public RandomBits {
 public:
  explicit SeededRng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t next_u64() override { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

/// OS randomness (libsodium). Used on the live client path, where query
/// coins must be unpredictable.
class SystemRng final : public RandomBits {
 public:
  std::uint64_t next_u64() override;
};

/// Deterministic coins derived from a keyed PRF of an input string
/// (ChaCha20 keystream under a BLAKE2b-derived key). Feeding the same
/// (key, input) always replays the same stream; this is what makes the
/// derandomized embedding mode of Emb repeat exactly per image.
class PrfRng final : public RandomBits {
 public:
  PrfRng(std::span<const std::uint8_t> key, std::span<const std::uint8_t> input);
  ~PrfRng() override;
  std::uint64_t next_u64() override;

 private:
  void refill();
  std::array<std::uint8_t, 32> key_{};
  std::array<std::uint8_t, 64> block_{};
  std::uint64_t counter_ = 0;
  unsigned pos_ = 64;
};

/// Child seed derivation: hash of (master, label). Adding a new label never
/// perturbs the stream of any other label.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);
std::array<std::uint8_t, 32> derive_key(std::uint64_t master, std::string_view label);

}  // namespace sbb
