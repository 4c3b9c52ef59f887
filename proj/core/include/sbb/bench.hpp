#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sbb/embedding.hpp"
#include "sbb/wire.hpp"

namespace sbb {

/// End-to-end benchmark over a loopback server. The no-SBB variant of each
/// cell answers with the whole database (threshold k = d); the SBB variant
/// applies the configured k. Link throughput is emulated by pacing socket
/// writes, mirroring the fixed-capacity two-host setups such measurements
/// are usually quoted for.
struct BenchConfig {
  std::vector<std::uint32_t> log2_sizes{18, 20};
  EmbeddingParams params{9, 0.05, 2, 256};
  std::uint32_t T = 32;
  wire::Mode mode = wire::Mode::retrieval;
  std::uint32_t repetitions = 3;
  std::uint64_t link_bytes_per_second = 125'000'000;  // 1 Gbit/s; 0 = off
  double cell_budget_seconds = 120.0;  // skip variants projected past this
  std::uint64_t seed = 1;
};

struct BenchRow {
  std::uint64_t db_size = 0;
  std::string protocol;    // "retrieval" | "sssp"
  bool with_sbb = false;
  bool completed = false;  // false renders as a dash
  double mean_seconds = 0.0;
  double sd_seconds = 0.0;
  double mean_mib = 0.0;  // payload bytes both directions
  double sd_mib = 0.0;
};

std::vector<BenchRow> run_bench(const BenchConfig& config);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace sbb
