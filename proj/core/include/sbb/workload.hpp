#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sbb/bitvec.hpp"
#include "sbb/distribution.hpp"

namespace sbb {

struct WorkloadRecord {
  BitVec hash;        // 256-bit
  std::uint64_t count = 1;
};

/// Workload file I/O. CSV carries a "hash,count" header; JSONL carries one
/// {"hash": "<64 hex>", "count": n} object per line. The format is picked
/// by file extension (.jsonl vs everything else).
std::vector<WorkloadRecord> read_workload(const std::string& path);
void write_workload_csv(std::ostream& out, const std::vector<WorkloadRecord>& records);
void write_workload_jsonl(std::ostream& out, const std::vector<WorkloadRecord>& records);

/// Database file: newline-delimited 64-hex-char hashes, optional
/// tab-separated id (ignored on read beyond validation).
std::vector<BitVec> read_database(const std::string& path);
void write_database(std::ostream& out, std::span<const BitVec> db);

HashDistribution to_distribution(const std::vector<WorkloadRecord>& records);

/// Synthetic request workload: clusters of near-duplicate hashes with
/// Zipf-skewed request counts. Cluster centers are uniform over the hash
/// space; members are centers with a random error of weight at most
/// cluster_radius; the database is the distinct member set.
struct SyntheticConfig {
  std::uint32_t num_clusters = 700;
  std::uint32_t cluster_radius = 8;       // < ell/2
  std::uint32_t members_min = 1;          // per-cluster member count, uniform
  std::uint32_t members_max = 12;
  double zipf_exponent = 0.8;             // popularity skew, > 0
  std::uint64_t num_requests = 200000;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SyntheticData {
  std::vector<WorkloadRecord> workload;  // members with at least one request
  std::vector<BitVec> database;          // distinct member hashes
};

SyntheticData generate_synthetic(const SyntheticConfig& config);

/// The configuration the regression suite and CLI defaults are pinned to.
SyntheticConfig default_synthetic_config();

/// All unordered support pairs at distance < T, capped at max_pairs (pairs
/// are taken in support order). Used to estimate correctness on a workload.
std::vector<std::pair<BitVec, BitVec>> similar_pairs(const HashDistribution& dist,
                                                     std::uint32_t T,
                                                     std::size_t max_pairs);

}  // namespace sbb
