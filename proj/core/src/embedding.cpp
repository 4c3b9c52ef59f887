#include "sbb/embedding.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <stdexcept>
#include <thread>

#include "sbb/errors.hpp"

namespace sbb {

void EmbeddingParams::validate() const {
  if (ell == 0 || ell > BitVec::kMaxBits)
    throw std::invalid_argument("params: ell must be in [1, 256]");
  if (d == 0 || d > ell) throw std::invalid_argument("params: need 1 <= d <= ell");
  if (!(gamma >= 0.0) || gamma >= 0.5)
    throw std::invalid_argument("params: need 0 <= gamma < 0.5");
  if (k > d) throw std::invalid_argument("params: need k <= d");
}

void IndexSet::validate(std::uint32_t ell) const {
  std::array<bool, BitVec::kMaxBits> seen{};
  for (auto ix : indices) {
    if (ix >= ell) throw std::invalid_argument("index set: position out of range");
    if (seen[ix]) throw std::invalid_argument("index set: duplicate position");
    seen[ix] = true;
  }
}

IndexSet sample_index_set(std::uint32_t ell, std::uint32_t d, RandomBits& rng) {
  if (d > ell) throw std::invalid_argument("sample_index_set: d exceeds ell");
  // Partial Fisher-Yates over [0, ell): the first d entries are a uniform
  // ordered d-subset.
  std::vector<std::uint16_t> pool(ell);
  for (std::uint32_t i = 0; i < ell; ++i) pool[i] = static_cast<std::uint16_t>(i);
  IndexSet out;
  out.indices.reserve(d);
  for (std::uint32_t i = 0; i < d; ++i) {
    const auto j = i + static_cast<std::uint32_t>(rng.uniform_below(ell - i));
    std::swap(pool[i], pool[j]);
    out.indices.push_back(pool[i]);
  }
  return out;
}

BitVec restrict_bits(const BitVec& v, const IndexSet& I) {
  BitVec out(I.size());
  for (std::uint32_t j = 0; j < I.size(); ++j) {
    const auto ix = I.indices[j];
    if (ix >= v.size()) throw std::invalid_argument("restrict: index out of range");
    out.set(j, v.get(ix));
  }
  return out;
}

BitVec flip_bits(const BitVec& bits, double gamma, RandomBits& rng) {
  if (!(gamma >= 0.0) || gamma >= 0.5)
    throw std::invalid_argument("flip: need 0 <= gamma < 0.5");
  BitVec out = bits;
  for (std::uint32_t i = 0; i < out.size(); ++i)
    if (rng.bernoulli(gamma)) out.toggle(i);
  return out;
}

CoarseEmbedding emb_lsh(const BitVec& hash, const EmbeddingParams& params, RandomBits& rng) {
  params.validate();
  if (hash.size() != params.ell)
    throw LengthMismatch("emb: hash length does not match params.ell");
  CoarseEmbedding e;
  e.index_set = sample_index_set(params.ell, params.d, rng);
  e.bits = flip_bits(restrict_bits(hash, e.index_set), params.gamma, rng);
  return e;
}

CoarseEmbedding emb_lsh_deterministic(const BitVec& hash, const EmbeddingParams& params,
                                      std::span<const std::uint8_t> key) {
  const auto input = hash.to_bytes();
  PrfRng coins(key, std::span<const std::uint8_t>(input.data(), input.size()));
  return emb_lsh(hash, params, coins);
}

std::uint32_t restricted_distance(const CoarseEmbedding& req, const BitVec& hash) {
  return hamming(req.bits, restrict_bits(hash, req.index_set));
}

std::vector<BitVec> Bucket::gather(std::span<const BitVec> db) const {
  std::vector<BitVec> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(db[id]);
  return out;
}

Bucket sim_lsh(const CoarseEmbedding& req, std::span<const BitVec> db, std::uint32_t k) {
  const auto d = req.index_set.size();
  if (req.bits.size() != d) throw LengthMismatch("sim: bits/index count mismatch");
  if (k > d) throw std::invalid_argument("sim: k exceeds d");

  // Scatter the request bits into hash positions once, and build a mask of
  // the sampled positions; the scan is then mask-and-popcount per member.
  BitVec expanded(db.empty() ? 256 : db.front().size());
  BitVec mask(expanded.size());
  for (std::uint32_t j = 0; j < d; ++j) {
    const auto ix = req.index_set.indices[j];
    if (ix >= expanded.size()) throw std::invalid_argument("sim: index out of range");
    mask.set(ix, true);
    expanded.set(ix, req.bits.get(j));
  }
  const auto mw = mask.words();
  const auto ew = expanded.words();

  Bucket b;
  for (std::uint32_t id = 0; id < db.size(); ++id) {
    const auto hw = db[id].words();
    std::uint32_t dist = 0;
    for (int w = 0; w < 4; ++w)
      dist += static_cast<std::uint32_t>(std::popcount((hw[w] ^ ew[w]) & mw[w]));
    if (dist <= k) b.ids.push_back(id);
  }
  return b;
}

Bucket sim_lsh_parallel(const CoarseEmbedding& req, std::span<const BitVec> db,
                        std::uint32_t k, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t chunk = (db.size() + threads - 1) / threads;
  if (threads <= 1 || db.size() < 4096) return sim_lsh(req, db, k);

  std::vector<Bucket> parts(threads);
  std::vector<std::thread> workers;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = std::min<std::size_t>(t * chunk, db.size());
    const std::size_t hi = std::min<std::size_t>(lo + chunk, db.size());
    workers.emplace_back([&, t, lo, hi] {
      parts[t] = sim_lsh(req, db.subspan(lo, hi - lo), k);
      for (auto& id : parts[t].ids) id += static_cast<std::uint32_t>(lo);
    });
  }
  for (auto& w : workers) w.join();

  Bucket out;
  for (const auto& p : parts) out.ids.insert(out.ids.end(), p.ids.begin(), p.ids.end());
  return out;
}

Bucket sim_cpdq(const BitVec& req16, std::span<const BitVec> coarse_db, std::uint32_t k) {
  Bucket b;
  for (std::uint32_t id = 0; id < coarse_db.size(); ++id)
    if (hamming(req16, coarse_db[id]) < k) b.ids.push_back(id);
  return b;
}

}  // namespace sbb
