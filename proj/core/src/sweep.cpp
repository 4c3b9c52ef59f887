#include "sbb/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <ostream>
#include <sstream>

#include "sbb/analysis.hpp"
#include "sbb/errors.hpp"
#include "sbb/metrics.hpp"
#include "sbb/rng.hpp"
#include "sbb/simulation.hpp"
#include "sbb/workload.hpp"

namespace sbb {

namespace {

// Two-sided 97.5% Student-t quantiles; index = degrees of freedom, capped.
constexpr double kT975[] = {0,     12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365,
                            2.306, 2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131,
                            2.120, 2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069,
                            2.064, 2.060,  2.056, 2.052, 2.048, 2.045, 2.042};

double t975(std::size_t dof) {
  if (dof == 0) return 0.0;
  if (dof < std::size(kT975)) return kT975[dof];
  return 1.96;
}

BitVec target_by_rank(const HashDistribution& dist, std::uint32_t rank) {
  std::vector<std::size_t> order(dist.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&dist](std::size_t a, std::size_t b) {
    if (dist.mass(a) != dist.mass(b)) return dist.mass(a) > dist.mass(b);
    return dist.hash(a) < dist.hash(b);
  });
  const auto ix = std::min<std::size_t>(rank == 0 ? 0 : rank - 1, order.size() - 1);
  return dist.hash(order[ix]);
}

struct CellResult {
  std::vector<SweepRow> rows;
};

struct IterationSamples {
  std::vector<std::vector<double>> prec;  // per rho
  std::vector<double> auc, acc, corr, alpha;
};

}  // namespace

void SweepGrid::validate() const {
  if (d_values.empty() || gamma_values.empty() || k_values.empty() || T_values.empty())
    throw EmptyInput("sweep: empty grid axis");
  if (iterations < 2) throw std::invalid_argument("sweep: need at least 2 iterations");
  if (trials == 0) throw std::invalid_argument("sweep: need trials");
}

MeanCi mean_ci(std::span<const double> samples) {
  MeanCi out;
  const auto n = samples.size();
  if (n == 0) return out;
  double mean = 0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(n);
  double var = 0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var = n > 1 ? var / static_cast<double>(n - 1) : 0.0;
  const double half = t975(n - 1) * std::sqrt(var / static_cast<double>(n));
  out.mean = mean;
  out.ci_low = mean - half;
  out.ci_high = mean + half;
  return out;
}

std::vector<SweepRow> sweep(const HashDistribution& workload, std::span<const BitVec> db,
                            const SweepGrid& grid) {
  grid.validate();
  const BitVec target = target_by_rank(workload, grid.target_rank);

  struct Cell {
    std::uint32_t d;
    double gamma;
    std::uint32_t k;
    std::uint32_t T;
  };
  std::vector<Cell> cells;
  for (auto d : grid.d_values)
    for (auto g : grid.gamma_values)
      for (auto k : grid.k_values)
        for (auto T : grid.T_values) cells.push_back({d, g, k, T});

  auto run_cell = [&](const Cell& cell) -> CellResult {
    EmbeddingParams params{cell.d, cell.gamma, std::min(cell.k, cell.d), 256};
    const auto pairs = similar_pairs(workload, cell.T, grid.max_pairs);

    IterationSamples samples;
    samples.prec.resize(grid.rho_values.size());
    for (std::uint32_t it = 0; it < grid.iterations; ++it) {
      std::ostringstream label;
      label << "sweep/d=" << cell.d << "/g=" << cell.gamma << "/k=" << cell.k
            << "/T=" << cell.T << "/iter=" << it;
      SeededRng rng(derive_seed(grid.seed, label.str()));

      const auto scored = run_matching_simulation(workload, target, params,
                                                  RepetitionConfig{}, grid.trials, rng);
      bool has_pos = false, has_neg = false;
      for (const auto& s : scored) (s.label ? has_pos : has_neg) = true;
      for (std::size_t r = 0; r < grid.rho_values.size(); ++r)
        if (has_pos)
          samples.prec[r].push_back(
              precision_at_recall(scored, grid.rho_values[r]).precision);
      if (has_pos && has_neg) {
        samples.auc.push_back(auc_advantage(scored));
        samples.acc.push_back(accuracy_advantage(scored));
      }
      if (!pairs.empty())
        samples.corr.push_back(
            empirical_correctness(pairs, params, grid.correctness_trials, rng));
      samples.alpha.push_back(
          compression_rate(workload, db, params, grid.compression_trials, rng));
    }

    CellResult out;
    auto push = [&](const std::string& metric, std::optional<double> rho,
                    std::span<const double> s) {
      if (s.empty()) return;
      const auto ci = mean_ci(s);
      out.rows.push_back(
          {cell.d, cell.gamma, cell.k, cell.T, rho, metric, ci.mean, ci.ci_low, ci.ci_high});
    };
    for (std::size_t r = 0; r < grid.rho_values.size(); ++r)
      push("eps_prec", grid.rho_values[r], samples.prec[r]);
    push("eps_auc", std::nullopt, samples.auc);
    push("eps_acc", std::nullopt, samples.acc);
    push("correctness", std::nullopt, samples.corr);
    push("alpha", std::nullopt, samples.alpha);
    return out;
  };

  // Cells are independent; fan out and reassemble in grid order.
  std::vector<std::future<CellResult>> futures;
  futures.reserve(cells.size());
  for (const auto& cell : cells)
    futures.push_back(std::async(std::launch::async, run_cell, cell));
  std::vector<SweepRow> rows;
  for (auto& f : futures) {
    auto r = f.get();
    rows.insert(rows.end(), r.rows.begin(), r.rows.end());
  }
  return rows;
}

namespace {
void write_row_fields(std::ostream& out, const SweepRow& r, const char* sep,
                      bool quote_metric) {
  out << r.d << sep << r.gamma << sep << r.k << sep;
  if (r.rho)
    out << *r.rho;
  out << sep;
  if (quote_metric)
    out << '"' << r.metric << '"';
  else
    out << r.metric;
  out << sep << r.value << sep << r.ci_low << sep << r.ci_high;
}
}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "d,gamma,k,rho,metric,value,ci_low,ci_high\n";
  for (const auto& r : rows) {
    write_row_fields(out, r, ",", false);
    out << "\n";
  }
}

void write_sweep_json(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << "  {\"d\": " << r.d << ", \"gamma\": " << r.gamma << ", \"k\": " << r.k
        << ", \"T\": " << r.T << ", \"rho\": ";
    if (r.rho)
      out << *r.rho;
    else
      out << "null";
    out << ", \"metric\": \"" << r.metric << "\", \"value\": " << r.value
        << ", \"ci_low\": " << r.ci_low << ", \"ci_high\": " << r.ci_high << "}";
    out << (i + 1 < rows.size() ? ",\n" : "\n");
  }
  out << "]\n";
}

}  // namespace sbb
