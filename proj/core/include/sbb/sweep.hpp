#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sbb/bitvec.hpp"
#include "sbb/distribution.hpp"

namespace sbb {

/// Parameter grid for the privacy / correctness / compression sweep. Every
/// cell is evaluated over `iterations` independent batches (fresh index set
/// and coins per batch) and reported with Student-t 95% confidence
/// intervals.
struct SweepGrid {
  std::vector<std::uint32_t> d_values{9};
  std::vector<double> gamma_values{0.05};
  std::vector<std::uint32_t> k_values{2};
  std::vector<std::uint32_t> T_values{32};
  std::vector<double> rho_values{0.0, 0.25, 0.5, 0.75, 1.0};
  std::uint32_t iterations = 10;      // >= 10
  std::uint32_t trials = 20000;       // simulated requests per batch
  std::uint32_t compression_trials = 500;
  std::uint32_t correctness_trials = 4;  // embeddings per pair per batch
  std::size_t max_pairs = 2000;
  std::uint32_t target_rank = 1;      // w_adv = rank-th most popular hash
  std::uint64_t seed = 1;

  void validate() const;
};

struct SweepRow {
  std::uint32_t d = 0;
  double gamma = 0.0;
  std::uint32_t k = 0;
  std::uint32_t T = 0;
  std::optional<double> rho;  // only for the precision metric
  std::string metric;         // eps_prec | eps_auc | eps_acc | correctness | alpha
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Runs the full grid. Cells execute in parallel; every cell derives its own
/// seed from (grid.seed, cell label), so output is independent of scheduling
/// and byte-identical across runs.
std::vector<SweepRow> sweep(const HashDistribution& workload, std::span<const BitVec> db,
                            const SweepGrid& grid);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Plot-data JSON: an array of row objects mirroring the CSV columns.
void write_sweep_json(std::ostream& out, const std::vector<SweepRow>& rows);

/// Student-t based mean and 95% interval over per-iteration samples.
struct MeanCi {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};
MeanCi mean_ci(std::span<const double> samples);

}  // namespace sbb
