#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sbb/bitvec.hpp"
#include "sbb/distribution.hpp"
#include "sbb/embedding.hpp"
#include "sbb/rng.hpp"

namespace sbb {

/// Inputs of the analytic lower bound on pairwise bucket-inclusion
/// probability (Hoeffding, two-factor form).
struct CorrectnessBoundInput {
  std::uint32_t ell = 256;
  std::uint32_t T = 32;
  std::uint32_t d = 9;
  double gamma = 0.05;
  std::uint32_t k = 3;
  double beta = 2.0;  // slack factor, > 1
};

/// (1 - e^{-2 ell (beta-1)^2 gamma^2}) * (1 - e^{-2 d (k/d - (T + beta ell gamma)/ell)^2}).
///
/// Lower-bounds P[Sim(Emb(w), w') = 1] for any pair at distance < T. Only
/// applicable when beta > 1 and k > d (T + beta ell gamma) / ell; throws
/// BoundInapplicable otherwise. The bound is loose; empirical rates at
/// practical parameters sit far above it.
double correctness_bound(const CorrectnessBoundInput& in);

/// Fraction of (pair, trial) events in which the partner of a freshly
/// embedded query lands in the bucket. Every supplied pair must be at
/// distance < T of each other; this estimates one minus the correctness
/// failure rate. Throws EmptyInput on an empty pair list.
double empirical_correctness(std::span<const std::pair<BitVec, BitVec>> pairs,
                             const EmbeddingParams& params, std::uint32_t trials,
                             RandomBits& rng);

/// Mean over sampled queries and embedding coins of |bucket| / |db|.
/// Queries are drawn from the workload distribution. Throws EmptyInput on an
/// empty database.
double compression_rate(const HashDistribution& workload, std::span<const BitVec> db,
                        const EmbeddingParams& params, std::uint32_t trials,
                        RandomBits& rng);

}  // namespace sbb
