#include "sbb/bench.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "sbb/client.hpp"
#include "sbb/rng.hpp"
#include "sbb/server.hpp"
#include "sbb/sweep.hpp"

namespace sbb {

namespace {

Database make_db(std::uint64_t size, std::uint64_t seed) {
  SeededRng rng(derive_seed(seed, "bench/db"));
  Database db;
  db.reserve(size);
  for (std::uint64_t i = 0; i < size; ++i) db.push_back(BitVec::random(256, rng));
  return db;
}

struct VariantStats {
  bool completed = false;
  double mean_seconds = 0, sd_seconds = 0, mean_mib = 0, sd_mib = 0;
};

VariantStats run_variant(const Database& db, const BenchConfig& config, bool with_sbb,
                         double budget_seconds) {
  ServerOptions opts;
  opts.k = with_sbb ? config.params.k : config.params.d;  // k = d returns everything
  opts.link_bytes_per_second = config.link_bytes_per_second;
  Server server(Database(db), opts);
  server.start("127.0.0.1", 0);

  ClientParams cp;
  cp.embedding = config.params;
  cp.T = config.T;
  cp.mode = config.mode;

  SeededRng rng(derive_seed(config.seed, with_sbb ? "bench/query/sbb" : "bench/query/full"));
  std::vector<double> secs, mibs;
  VariantStats out;
  const auto started = std::chrono::steady_clock::now();
  for (std::uint32_t r = 0; r < config.repetitions; ++r) {
    // Half the queries match a database entry, half are fresh.
    const BitVec q = (r % 2 == 0 && !db.empty())
                         ? db[rng.uniform_below(db.size())]
                         : BitVec::random(256, rng);
    const auto res = query("127.0.0.1", server.port(), q, cp, rng);
    secs.push_back(res.metrics.total_millis() / 1e3);
    mibs.push_back(static_cast<double>(res.metrics.total_sent() +
                                       res.metrics.total_received()) /
                   (1024.0 * 1024.0));
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    // Projected overrun: report the cell as failed rather than stalling the
    // whole table.
    if (elapsed + secs.back() > budget_seconds && r + 1 < config.repetitions) {
      server.stop();
      return out;
    }
  }
  server.stop();

  const auto s = mean_ci(secs);
  const auto m = mean_ci(mibs);
  out.completed = true;
  out.mean_seconds = s.mean;
  out.mean_mib = m.mean;
  double vs = 0, vm = 0;
  for (std::size_t i = 0; i < secs.size(); ++i) {
    vs += (secs[i] - s.mean) * (secs[i] - s.mean);
    vm += (mibs[i] - m.mean) * (mibs[i] - m.mean);
  }
  if (secs.size() > 1) {
    out.sd_seconds = std::sqrt(vs / static_cast<double>(secs.size() - 1));
    out.sd_mib = std::sqrt(vm / static_cast<double>(mibs.size() - 1));
  }
  return out;
}

}  // namespace

namespace {

// Rough per-variant cost projection so hopeless cells surface as dashes
// instead of stalling the table for minutes.
double projected_seconds(const BenchConfig& config, std::uint64_t size, bool with_sbb) {
  const double members =
      with_sbb ? static_cast<double>(size) * 0.30 : static_cast<double>(size);
  const double link = config.link_bytes_per_second > 0
                          ? static_cast<double>(config.link_bytes_per_second)
                          : 2e9;
  if (config.mode == wire::Mode::retrieval)
    return config.repetitions * (32.0 * members / link + members * 1e-8 + 0.01);
  // Sketch mode pays two exponentiations and a token per member on the
  // server plus a decode and blind on the client.
  return config.repetitions * (members * 2.5e-4 + 100.0 * members / link + 0.01);
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& config) {
  std::vector<BenchRow> rows;
  for (auto lg : config.log2_sizes) {
    const std::uint64_t size = std::uint64_t{1} << lg;
    const auto db = make_db(size, config.seed + lg);
    for (bool with_sbb : {false, true}) {
      VariantStats stats;
      if (projected_seconds(config, size, with_sbb) <= config.cell_budget_seconds)
        stats = run_variant(db, config, with_sbb, config.cell_budget_seconds);
      BenchRow row;
      row.db_size = size;
      row.protocol = config.mode == wire::Mode::retrieval ? "retrieval" : "sssp";
      row.with_sbb = with_sbb;
      row.completed = stats.completed;
      row.mean_seconds = stats.mean_seconds;
      row.sd_seconds = stats.sd_seconds;
      row.mean_mib = stats.mean_mib;
      row.sd_mib = stats.sd_mib;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "db_size,protocol,variant,status,mean_seconds,sd_seconds,mean_mib,sd_mib\n";
  for (const auto& r : rows) {
    out << r.db_size << "," << r.protocol << "," << (r.with_sbb ? "sbb" : "full") << ",";
    if (!r.completed) {
      out << "skipped,-,-,-,-\n";
      continue;
    }
    out << "ok," << r.mean_seconds << "," << r.sd_seconds << "," << r.mean_mib << ","
        << r.sd_mib << "\n";
  }
}

}  // namespace sbb
