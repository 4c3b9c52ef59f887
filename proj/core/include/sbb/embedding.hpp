#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sbb/bitvec.hpp"
#include "sbb/rng.hpp"

namespace sbb {

/// Parameters of the LSH-based coarse embedding scheme.
struct EmbeddingParams {
  std::uint32_t d = 9;       // number of sampled indices, 1 <= d <= ell
  double gamma = 0.05;       // per-bit flip probability, in [0, 0.5)
  std::uint32_t k = 2;       // server-side coarse threshold, <= d
  std::uint32_t ell = 256;   // similarity hash length

  void validate() const;
};

/// Ordered set of d distinct positions in [0, ell). Order matters: the
/// embedding bits are transmitted in index order.
struct IndexSet {
  std::vector<std::uint16_t> indices;

  std::uint32_t size() const { return static_cast<std::uint32_t>(indices.size()); }
  void validate(std::uint32_t ell) const;  // distinct, each < ell
};

/// Uniform d-subset of [0, ell), without replacement, order recorded.
IndexSet sample_index_set(std::uint32_t ell, std::uint32_t d, RandomBits& rng);

/// I(v): the bits of v at the sampled positions, in index order.
BitVec restrict_bits(const BitVec& v, const IndexSet& I);

/// Flip_gamma: each bit independently negated with probability gamma.
BitVec flip_bits(const BitVec& bits, double gamma, RandomBits& rng);

/// The client request: an index set and the noisy restricted bits.
struct CoarseEmbedding {
  IndexSet index_set;
  BitVec bits;
};

/// Emb: sample I, restrict the hash, add flip noise.
CoarseEmbedding emb_lsh(const BitVec& hash, const EmbeddingParams& params, RandomBits& rng);

/// Derandomized variant: index set and flip coins are replayed from a PRF of
/// the hash under a client-shared secret key, so the same image always
/// produces the same request.
CoarseEmbedding emb_lsh_deterministic(const BitVec& hash, const EmbeddingParams& params,
                                      std::span<const std::uint8_t> key);

/// Hamming distance between a request's bits and I(hash).
std::uint32_t restricted_distance(const CoarseEmbedding& req, const BitVec& hash);

/// Candidate bucket: positions into the database it was scanned from.
struct Bucket {
  std::vector<std::uint32_t> ids;

  std::size_t size() const { return ids.size(); }
  std::vector<BitVec> gather(std::span<const BitVec> db) const;
};

/// Sim: every database member whose restricted hash lies within Hamming
/// distance <= k of the request bits, in database order.
Bucket sim_lsh(const CoarseEmbedding& req, std::span<const BitVec> db, std::uint32_t k);

/// Same result, scanned in parallel chunks over the read-only database.
/// threads = 0 picks the hardware concurrency.
Bucket sim_lsh_parallel(const CoarseEmbedding& req, std::span<const BitVec> db,
                        std::uint32_t k, unsigned threads = 0);

/// Coarse-hash baseline test: members whose 16-bit coarse hash is within
/// distance strictly smaller than k of the request.
Bucket sim_cpdq(const BitVec& req16, std::span<const BitVec> coarse_db, std::uint32_t k);

}  // namespace sbb
