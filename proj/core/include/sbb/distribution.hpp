#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sbb/bitvec.hpp"
#include "sbb/rng.hpp"

namespace sbb {

/// Probability mass over distinct similarity hashes, as induced by a
/// request workload. Immutable after construction; safe to share across
/// simulation workers.
class HashDistribution {
 public:
  /// mass(v) = count(v) / total. Duplicate hashes accumulate.
  /// Throws EmptyInput when the workload is empty, and rejects zero counts.
  static HashDistribution from_counts(
      std::span<const std::pair<BitVec, std::uint64_t>> workload);

  std::size_t size() const { return support_.size(); }
  const BitVec& hash(std::size_t i) const { return support_[i]; }
  double mass(std::size_t i) const { return mass_[i]; }
  double log_mass(std::size_t i) const { return log_mass_[i]; }
  std::span<const BitVec> support() const { return support_; }

  std::optional<std::size_t> find(const BitVec& v) const;
  double mass_of(const BitVec& v) const;  // 0 when out of support

  /// Sample an index according to the mass (inverse-CDF).
  std::size_t sample(RandomBits& rng) const;

  double total_mass() const;  // sums to 1 within accumulation error

 private:
  std::vector<BitVec> support_;
  std::vector<double> mass_;
  std::vector<double> log_mass_;
  std::vector<double> cdf_;
  std::unordered_map<BitVec, std::size_t, BitVecHash> index_;
};

}  // namespace sbb
