#include <benchmark/benchmark.h>

#include <vector>

#include "sbb/embedding.hpp"
#include "sbb/image.hpp"
#include "sbb/pdq.hpp"
#include "sbb/posterior.hpp"
#include "sbb/rng.hpp"
#include "sbb/sketch.hpp"

namespace {

using namespace sbb;

void BM_Hamming256(benchmark::State& state) {
  SeededRng rng(1);
  const auto a = BitVec::random(256, rng);
  const auto b = BitVec::random(256, rng);
  for (auto _ : state) benchmark::DoNotOptimize(hamming(a, b));
}
BENCHMARK(BM_Hamming256);

void BM_DatabaseScan(benchmark::State& state) {
  SeededRng rng(2);
  std::vector<BitVec> db;
  db.reserve(static_cast<std::size_t>(state.range()));
  for (std::int64_t i = 0; i < state.range(); ++i) db.push_back(BitVec::random(256, rng));
  const auto emb = emb_lsh(db[0], {9, 0.05, 2, 256}, rng);
  for (auto _ : state) {
    auto bucket = sim_lsh(emb, db, 2);
    benchmark::DoNotOptimize(bucket);
  }
  state.SetItemsProcessed(state.iterations() * state.range());
}
BENCHMARK(BM_DatabaseScan)->RangeMultiplier(4)->Range(1 << 14, 1 << 20);

void BM_ComputeHash(benchmark::State& state) {
  SeededRng rng(3);
  LuminanceImage img{512, 512, {}};
  img.pixels.resize(512 * 512);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.next_u64());
  for (auto _ : state) benchmark::DoNotOptimize(compute_hash(img));
}
BENCHMARK(BM_ComputeHash);

void BM_SketchRecover(benchmark::State& state) {
  SeededRng rng(4);
  const auto code = SketchCode::reed_muller(8);
  const auto v = BitVec::random(256, rng);
  const auto z = code.sketch(v);
  auto noisy = v;
  for (int i = 0; i < 40; ++i) noisy.toggle(static_cast<std::uint32_t>(rng.uniform_below(256)));
  for (auto _ : state) benchmark::DoNotOptimize(code.recover(z, noisy));
}
BENCHMARK(BM_SketchRecover);

void BM_PosteriorBatch(benchmark::State& state) {
  SeededRng rng(5);
  std::vector<std::pair<BitVec, std::uint64_t>> counts;
  for (std::int64_t i = 0; i < state.range(); ++i)
    counts.emplace_back(BitVec::random(256, rng), 1 + rng.uniform_below(100));
  const auto dist = HashDistribution::from_counts(counts);
  const auto req = emb_lsh(dist.hash(0), {9, 0.05, 2, 256}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(posterior_vector(req, dist, 0.05));
  state.SetItemsProcessed(state.iterations() * state.range());
}
BENCHMARK(BM_PosteriorBatch)->Range(1 << 10, 1 << 16);

}  // namespace

BENCHMARK_MAIN();
