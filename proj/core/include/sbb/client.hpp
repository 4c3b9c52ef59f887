#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sbb/bitvec.hpp"
#include "sbb/embedding.hpp"
#include "sbb/rng.hpp"
#include "sbb/wire.hpp"

namespace sbb {

/// Wall time and transferred payload bytes, broken down by protocol phase.
struct PhaseMetric {
  std::string name;
  double millis = 0.0;
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
};

struct SessionMetrics {
  std::vector<PhaseMetric> phases;

  double total_millis() const;
  std::uint64_t total_sent() const;
  std::uint64_t total_received() const;
  const PhaseMetric* phase(const std::string& name) const;
};

struct ClientParams {
  EmbeddingParams embedding;
  std::uint32_t T = 32;  // retrieval-mode similarity threshold
  wire::Mode mode = wire::Mode::retrieval;
  /// When set, embedding coins are replayed from a PRF of the hash under
  /// this key, so repeated queries for one image are identical requests.
  std::optional<std::array<std::uint8_t, 32>> deterministic_key;
};

struct QueryResult {
  bool match = false;
  std::size_t bucket_size = 0;
  SessionMetrics metrics;
};

/// One two-stage query: coarse request, then the second-stage protocol
/// (plaintext retrieval with a local distance check, or the sketch + OPRF
/// flow). rng supplies the embedding coins and the OPRF blinding key.
QueryResult query(const std::string& host, std::uint16_t port, const BitVec& hash,
                  const ClientParams& params, RandomBits& rng);

}  // namespace sbb
