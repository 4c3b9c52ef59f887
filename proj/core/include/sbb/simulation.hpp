#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sbb/distribution.hpp"
#include "sbb/embedding.hpp"
#include "sbb/metrics.hpp"
#include "sbb/posterior.hpp"

namespace sbb {

enum class RepetitionMode : std::uint8_t {
  /// Fresh index set and coins for every embedding.
  independent,
  /// One index set shared by the whole batch (and by all repetitions of a
  /// request); flip coins stay fresh. This is the single-query baseline.
  fixed_index,
  /// Index set and flip coins replayed from a PRF of the hash, so repeats
  /// of one image are byte-identical requests.
  deterministic,
};

struct RepetitionConfig {
  std::uint32_t q = 1;
  RepetitionMode mode = RepetitionMode::fixed_index;
  std::array<std::uint8_t, 32> prf_key{};  // deterministic mode only
};

/// The matching game: for `trials` simulated requests drawn from the
/// workload, emit the Bayes posterior of the target hash as the adversary
/// score and the ground-truth predicate F(w) == target as the label.
///
/// In deterministic mode duplicate request tuples carry no fresh evidence,
/// so the scorer collapses them before applying the repeated-query
/// posterior; with independent coins all q requests enter the exponent.
std::vector<ScoredRequest> run_matching_simulation(const HashDistribution& workload,
                                                   const BitVec& target,
                                                   const EmbeddingParams& params,
                                                   const RepetitionConfig& rep,
                                                   std::uint32_t trials, RandomBits& rng);

/// Request mass binned by the number of distinct workload hashes within
/// distance < T of the request's hash (the hash itself included).
struct NeighborhoodHistogram {
  double exactly_one = 0.0;
  double from_2_to_10 = 0.0;
  double from_11_to_100 = 0.0;
  double above_100 = 0.0;
};

NeighborhoodHistogram neighborhood_distribution(const HashDistribution& workload,
                                                std::uint32_t T);

}  // namespace sbb
