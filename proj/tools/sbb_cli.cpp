// Command-line surface for the bucketized similarity-testing toolkit:
// hashing, embedding, the client/server pair, privacy simulations,
// parameter sweeps, synthetic workload generation, and benchmarks.

#include <algorithm>
#include <array>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sbb/bench.hpp"
#include "sbb/client.hpp"
#include "sbb/embedding.hpp"
#include "sbb/errors.hpp"
#include "sbb/image.hpp"
#include "sbb/metrics.hpp"
#include "sbb/pdq.hpp"
#include "sbb/rng.hpp"
#include "sbb/server.hpp"
#include "sbb/simulation.hpp"
#include "sbb/sweep.hpp"
#include "sbb/workload.hpp"

namespace {

using sbb::BitVec;

struct OutFile {
  std::string path;  // empty = stdout

  template <class F>
  void write(F&& fn) const {
    if (path.empty()) {
      fn(std::cout);
      return;
    }
    std::ofstream f(path);
    if (!f) throw sbb::Error("cannot open output file " + path);
    fn(f);
  }
};

std::unique_ptr<sbb::RandomBits> make_rng(std::optional<std::uint64_t> seed) {
  if (seed) return std::make_unique<sbb::SeededRng>(*seed);
  return std::make_unique<sbb::SystemRng>();
}

std::array<std::uint8_t, 32> parse_key(const std::string& hex) {
  if (hex.size() != 64) throw sbb::ParseError("key must be 64 hex chars");
  const auto v = BitVec::from_hex(hex, 256);
  const auto bytes = v.to_bytes();
  std::array<std::uint8_t, 32> key{};
  std::copy(bytes.begin(), bytes.end(), key.begin());
  return key;
}

std::pair<std::string, std::uint16_t> parse_hostport(const std::string& s) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos) throw sbb::ParseError("expected host:port");
  const auto port = std::stoul(s.substr(colon + 1));
  if (port == 0 || port > 65535) throw sbb::ParseError("port out of range");
  return {s.substr(0, colon), static_cast<std::uint16_t>(port)};
}

volatile std::sig_atomic_t g_stop = 0;
void handle_signal(int) { g_stop = 1; }

void print_metrics_csv(std::ostream& out, const sbb::SessionMetrics& m) {
  out << "phase,millis,bytes_sent,bytes_received\n";
  for (const auto& p : m.phases)
    out << p.name << "," << p.millis << "," << p.bytes_sent << "," << p.bytes_received
        << "\n";
  out << "total," << m.total_millis() << "," << m.total_sent() << ","
      << m.total_received() << "\n";
}

int cmd_hash(const std::string& path, bool coarse) {
  const auto img = sbb::load_pgm_file(path);
  std::cout << (coarse ? sbb::compute_coarse_pdq(img) : sbb::compute_hash(img)).to_hex()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"similarity-based bucketization toolkit"};
  app.require_subcommand(1);

  // ---- hash ----
  std::string hash_file;
  bool hash_coarse = false;
  auto* c_hash = app.add_subcommand("hash", "hash a PGM (P5) image");
  c_hash->add_option("file", hash_file, "binary PGM file")->required();
  c_hash->add_flag("--coarse", hash_coarse, "emit the 16-bit coarse hash");

  // ---- embed ----
  std::string embed_hash;
  sbb::EmbeddingParams embed_params;
  std::optional<std::uint64_t> embed_seed;
  std::string embed_key;
  auto* c_embed = app.add_subcommand("embed", "coarse-embed a similarity hash");
  c_embed->add_option("hash", embed_hash, "64 hex chars")->required();
  c_embed->add_option("--d", embed_params.d, "indices to sample");
  c_embed->add_option("--gamma", embed_params.gamma, "flip probability");
  c_embed->add_option("--seed", embed_seed, "seeded coins (default: OS randomness)");
  c_embed->add_option("--key", embed_key, "64-hex PRF key: derandomized embedding");

  // ---- serve ----
  std::string serve_db, serve_bind = "127.0.0.1:7654";
  std::uint32_t serve_k = 2;
  std::uint64_t serve_link = 0;
  auto* c_serve = app.add_subcommand("serve", "run the bucketizing server");
  c_serve->add_option("--db", serve_db, "database file (hex hashes)")->required();
  c_serve->add_option("--k", serve_k, "coarse threshold");
  c_serve->add_option("--bind", serve_bind, "host:port (port 0 = ephemeral)");
  c_serve->add_option("--link-rate", serve_link, "write pacing, bytes/s (0 = off)");

  // ---- query ----
  std::string query_server = "127.0.0.1:7654", query_hash, query_image, query_mode =
      "retrieval", query_key;
  sbb::ClientParams query_params;
  std::optional<std::uint64_t> query_seed;
  std::string query_out;
  auto* c_query = app.add_subcommand("query", "query a server for a similarity match");
  c_query->add_option("--server", query_server, "host:port");
  c_query->add_option("--hash", query_hash, "64 hex chars");
  c_query->add_option("--image", query_image, "PGM file to hash and query");
  c_query->add_option("--d", query_params.embedding.d);
  c_query->add_option("--gamma", query_params.embedding.gamma);
  c_query->add_option("--T", query_params.T, "similarity threshold (retrieval)");
  c_query->add_option("--mode", query_mode)->check(CLI::IsMember({"retrieval", "sssp"}));
  c_query->add_option("--seed", query_seed);
  c_query->add_option("--key", query_key, "64-hex PRF key: derandomized embedding");
  c_query->add_option("--out", query_out, "metrics CSV path (default stdout)");

  // ---- simulate ----
  std::string sim_workload, sim_target, sim_mode = "fixed-index", sim_out;
  std::uint32_t sim_rank = 1, sim_trials = 20000, sim_iterations = 10, sim_q = 1;
  sbb::EmbeddingParams sim_params;
  std::uint32_t sim_T = 32;
  std::vector<double> sim_rho{0.0, 0.25, 0.5, 0.75, 1.0};
  std::uint64_t sim_seed = 1;
  auto* c_sim = app.add_subcommand("simulate", "matching-attack privacy metrics");
  c_sim->add_option("--workload", sim_workload, "hash,count file")->required();
  c_sim->add_option("--target", sim_target, "adversary hash (64 hex)");
  c_sim->add_option("--target-rank", sim_rank, "popularity rank when --target unset");
  c_sim->add_option("--d", sim_params.d);
  c_sim->add_option("--gamma", sim_params.gamma);
  c_sim->add_option("--k", sim_params.k);
  c_sim->add_option("--T", sim_T);
  c_sim->add_option("--trials", sim_trials, "requests per iteration");
  c_sim->add_option("--iterations", sim_iterations);
  c_sim->add_option("--q", sim_q, "repetitions per request");
  c_sim->add_option("--rep-mode", sim_mode)
      ->check(CLI::IsMember({"independent", "fixed-index", "deterministic"}));
  c_sim->add_option("--rho", sim_rho)->delimiter(',');
  c_sim->add_option("--seed", sim_seed);
  c_sim->add_option("--out", sim_out);

  // ---- sweep ----
  std::string sweep_workload, sweep_db, sweep_out, sweep_json;
  sbb::SweepGrid grid;
  auto* c_sweep = app.add_subcommand("sweep", "parameter-grid evaluation");
  c_sweep->add_option("--workload", sweep_workload)->required();
  c_sweep->add_option("--db", sweep_db, "database file (default: workload support)");
  c_sweep->add_option("--d", grid.d_values)->delimiter(',');
  c_sweep->add_option("--gamma", grid.gamma_values)->delimiter(',');
  c_sweep->add_option("--k", grid.k_values)->delimiter(',');
  c_sweep->add_option("--T", grid.T_values)->delimiter(',');
  c_sweep->add_option("--rho", grid.rho_values)->delimiter(',');
  c_sweep->add_option("--iterations", grid.iterations);
  c_sweep->add_option("--trials", grid.trials);
  c_sweep->add_option("--target-rank", grid.target_rank);
  c_sweep->add_option("--seed", grid.seed);
  c_sweep->add_option("--out", sweep_out, "results CSV (default stdout)");
  c_sweep->add_option("--plot-json", sweep_json, "plot-data JSON path");

  // ---- bench ----
  sbb::BenchConfig bench_config;
  std::string bench_mode = "retrieval", bench_out;
  auto* c_bench = app.add_subcommand("bench", "end-to-end time/bandwidth table");
  c_bench->add_option("--sizes", bench_config.log2_sizes, "log2 database sizes")
      ->delimiter(',');
  c_bench->add_option("--d", bench_config.params.d);
  c_bench->add_option("--gamma", bench_config.params.gamma);
  c_bench->add_option("--k", bench_config.params.k);
  c_bench->add_option("--T", bench_config.T);
  c_bench->add_option("--mode", bench_mode)->check(CLI::IsMember({"retrieval", "sssp"}));
  c_bench->add_option("--reps", bench_config.repetitions);
  c_bench->add_option("--link-rate", bench_config.link_bytes_per_second,
                      "emulated link, bytes/s (0 = unthrottled)");
  c_bench->add_option("--budget", bench_config.cell_budget_seconds, "per-cell seconds");
  c_bench->add_option("--seed", bench_config.seed);
  c_bench->add_option("--out", bench_out);

  // ---- synth ----
  sbb::SyntheticConfig synth_config;
  std::string synth_json, synth_workload_path, synth_db_path, synth_format = "csv";
  auto* c_synth = app.add_subcommand("synth", "generate a synthetic workload + database");
  c_synth->add_option("--config", synth_json, "JSON config file");
  c_synth->add_option("--clusters", synth_config.num_clusters);
  c_synth->add_option("--radius", synth_config.cluster_radius);
  c_synth->add_option("--members-min", synth_config.members_min);
  c_synth->add_option("--members-max", synth_config.members_max);
  c_synth->add_option("--zipf", synth_config.zipf_exponent);
  c_synth->add_option("--requests", synth_config.num_requests);
  c_synth->add_option("--seed", synth_config.seed);
  c_synth->add_option("--out-workload", synth_workload_path)->required();
  c_synth->add_option("--out-db", synth_db_path)->required();
  c_synth->add_option("--format", synth_format)->check(CLI::IsMember({"csv", "jsonl"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_hash) return cmd_hash(hash_file, hash_coarse);

    if (*c_embed) {
      const auto hash = BitVec::from_hex(embed_hash, 256);
      sbb::CoarseEmbedding emb;
      if (!embed_key.empty()) {
        emb = sbb::emb_lsh_deterministic(hash, embed_params, parse_key(embed_key));
      } else {
        auto rng = make_rng(embed_seed);
        emb = sbb::emb_lsh(hash, embed_params, *rng);
      }
      for (std::uint32_t j = 0; j < emb.index_set.size(); ++j)
        std::cout << emb.index_set.indices[j] << " " << (emb.bits.get(j) ? 1 : 0) << "\n";
      return 0;
    }

    if (*c_serve) {
      const auto [host, port] = parse_hostport(serve_bind);
      sbb::ServerOptions opts;
      opts.k = serve_k;
      opts.link_bytes_per_second = serve_link;
      sbb::Server server(sbb::read_database(serve_db), opts);
      server.start(host, port);
      std::cerr << "listening on " << host << ":" << server.port() << " (db "
                << server.database_size() << " hashes, k=" << serve_k << ")\n";
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.stop();
      return 0;
    }

    if (*c_query) {
      BitVec hash;
      if (!query_hash.empty()) {
        hash = BitVec::from_hex(query_hash, 256);
      } else if (!query_image.empty()) {
        hash = sbb::compute_hash(sbb::load_pgm_file(query_image));
      } else {
        throw sbb::Error("query: need --hash or --image");
      }
      query_params.mode =
          query_mode == "sssp" ? sbb::wire::Mode::sssp : sbb::wire::Mode::retrieval;
      if (!query_key.empty()) query_params.deterministic_key = parse_key(query_key);
      const auto [host, port] = parse_hostport(query_server);
      auto rng = make_rng(query_seed);
      const auto result = sbb::query(host, port, hash, query_params, *rng);
      std::cout << "match " << (result.match ? "true" : "false") << " bucket "
                << result.bucket_size << "\n";
      OutFile{query_out}.write(
          [&result](std::ostream& out) { print_metrics_csv(out, result.metrics); });
      return 0;
    }

    if (*c_sim) {
      const auto records = sbb::read_workload(sim_workload);
      const auto dist = sbb::to_distribution(records);
      BitVec target;
      if (!sim_target.empty()) {
        target = BitVec::from_hex(sim_target, 256);
      } else {
        // rank-th most frequent hash
        std::vector<std::size_t> order(dist.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&dist](std::size_t a, std::size_t b) {
          if (dist.mass(a) != dist.mass(b)) return dist.mass(a) > dist.mass(b);
          return dist.hash(a) < dist.hash(b);
        });
        target = dist.hash(order[std::min<std::size_t>(sim_rank - 1, order.size() - 1)]);
      }
      sbb::RepetitionConfig rep;
      rep.q = sim_q;
      rep.mode = sim_mode == "independent"
                     ? sbb::RepetitionMode::independent
                     : (sim_mode == "deterministic" ? sbb::RepetitionMode::deterministic
                                                    : sbb::RepetitionMode::fixed_index);
      rep.prf_key = sbb::derive_key(sim_seed, "simulate/prf-key");

      std::vector<std::vector<double>> prec(sim_rho.size());
      std::vector<double> auc, acc;
      for (std::uint32_t it = 0; it < sim_iterations; ++it) {
        sbb::SeededRng rng(sbb::derive_seed(sim_seed, "simulate/iter=" + std::to_string(it)));
        const auto scored =
            sbb::run_matching_simulation(dist, target, sim_params, rep, sim_trials, rng);
        bool has_pos = false, has_neg = false;
        for (const auto& s : scored) (s.label ? has_pos : has_neg) = true;
        if (!has_pos) continue;
        for (std::size_t r = 0; r < sim_rho.size(); ++r)
          prec[r].push_back(sbb::precision_at_recall(scored, sim_rho[r]).precision);
        if (has_neg) {
          auc.push_back(sbb::auc_advantage(scored));
          acc.push_back(sbb::accuracy_advantage(scored));
        }
      }
      OutFile{sim_out}.write([&](std::ostream& out) {
        out << "d,gamma,k,rho,metric,value,ci_low,ci_high\n";
        auto row = [&](const std::string& metric, std::optional<double> rho,
                       std::span<const double> s) {
          if (s.empty()) return;
          const auto ci = sbb::mean_ci(s);
          out << sim_params.d << "," << sim_params.gamma << "," << sim_params.k << ",";
          if (rho) out << *rho;
          out << "," << metric << "," << ci.mean << "," << ci.ci_low << "," << ci.ci_high
              << "\n";
        };
        for (std::size_t r = 0; r < sim_rho.size(); ++r) row("eps_prec", sim_rho[r], prec[r]);
        row("eps_auc", std::nullopt, auc);
        row("eps_acc", std::nullopt, acc);
      });
      return 0;
    }

    if (*c_sweep) {
      const auto records = sbb::read_workload(sweep_workload);
      const auto dist = sbb::to_distribution(records);
      std::vector<BitVec> db;
      if (!sweep_db.empty()) {
        db = sbb::read_database(sweep_db);
      } else {
        db.assign(dist.support().begin(), dist.support().end());
      }
      const auto rows = sbb::sweep(dist, db, grid);
      OutFile{sweep_out}.write(
          [&rows](std::ostream& out) { sbb::write_sweep_csv(out, rows); });
      if (!sweep_json.empty())
        OutFile{sweep_json}.write(
            [&rows](std::ostream& out) { sbb::write_sweep_json(out, rows); });
      return 0;
    }

    if (*c_bench) {
      bench_config.mode =
          bench_mode == "sssp" ? sbb::wire::Mode::sssp : sbb::wire::Mode::retrieval;
      const auto rows = sbb::run_bench(bench_config);
      OutFile{bench_out}.write(
          [&rows](std::ostream& out) { sbb::write_bench_csv(out, rows); });
      return 0;
    }

    if (*c_synth) {
      if (!synth_json.empty()) {
        std::ifstream f(synth_json);
        if (!f) throw sbb::Error("cannot open " + synth_json);
        nlohmann::json j;
        f >> j;
        synth_config.num_clusters = j.value("num_clusters", synth_config.num_clusters);
        synth_config.cluster_radius = j.value("cluster_radius", synth_config.cluster_radius);
        synth_config.members_min = j.value("members_min", synth_config.members_min);
        synth_config.members_max = j.value("members_max", synth_config.members_max);
        synth_config.zipf_exponent = j.value("zipf_exponent", synth_config.zipf_exponent);
        synth_config.num_requests = j.value("num_requests", synth_config.num_requests);
        synth_config.seed = j.value("seed", synth_config.seed);
      }
      const auto data = sbb::generate_synthetic(synth_config);
      OutFile{synth_workload_path}.write([&](std::ostream& out) {
        if (synth_format == "jsonl")
          sbb::write_workload_jsonl(out, data.workload);
        else
          sbb::write_workload_csv(out, data.workload);
      });
      OutFile{synth_db_path}.write(
          [&data](std::ostream& out) { sbb::write_database(out, data.database); });
      std::cerr << "workload " << data.workload.size() << " hashes, database "
                << data.database.size() << " hashes\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
