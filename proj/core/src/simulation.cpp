#include "sbb/simulation.hpp"

#include <algorithm>

#include "sbb/errors.hpp"

namespace sbb {

namespace {

bool same_request(const CoarseEmbedding& a, const CoarseEmbedding& b) {
  return a.index_set.indices == b.index_set.indices && a.bits == b.bits;
}

// Drop byte-identical request tuples; repeats of a PRF-fixed embedding are
// pure replays and must not multiply the likelihood exponent.
std::vector<CoarseEmbedding> dedupe(std::vector<CoarseEmbedding> reqs) {
  std::vector<CoarseEmbedding> out;
  for (auto& r : reqs) {
    bool dup = false;
    for (const auto& seen : out)
      if (same_request(seen, r)) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<ScoredRequest> run_matching_simulation(const HashDistribution& workload,
                                                   const BitVec& target,
                                                   const EmbeddingParams& params,
                                                   const RepetitionConfig& rep,
                                                   std::uint32_t trials, RandomBits& rng) {
  params.validate();
  if (rep.q == 0) throw std::invalid_argument("simulation: q must be >= 1");
  if (workload.size() == 0) throw EmptyInput("simulation: empty workload");

  const IndexSet batch_index = sample_index_set(params.ell, params.d, rng);

  std::vector<ScoredRequest> out;
  out.reserve(trials);
  for (std::uint32_t t = 0; t < trials; ++t) {
    const BitVec& v = workload.hash(workload.sample(rng));

    std::vector<CoarseEmbedding> reqs;
    reqs.reserve(rep.q);
    for (std::uint32_t j = 0; j < rep.q; ++j) {
      switch (rep.mode) {
        case RepetitionMode::independent:
          reqs.push_back(emb_lsh(v, params, rng));
          break;
        case RepetitionMode::fixed_index: {
          CoarseEmbedding e;
          e.index_set = batch_index;
          e.bits = flip_bits(restrict_bits(v, e.index_set), params.gamma, rng);
          reqs.push_back(std::move(e));
          break;
        }
        case RepetitionMode::deterministic:
          reqs.push_back(emb_lsh_deterministic(v, params, rep.prf_key));
          break;
      }
    }
    if (rep.mode == RepetitionMode::deterministic) reqs = dedupe(std::move(reqs));

    ScoredRequest s;
    s.score = posterior_repeated(reqs, target, workload, params.gamma);
    s.label = (v == target);
    out.push_back(s);
  }
  return out;
}

NeighborhoodHistogram neighborhood_distribution(const HashDistribution& workload,
                                                std::uint32_t T) {
  if (workload.size() == 0) throw EmptyInput("neighborhood: empty workload");
  NeighborhoodHistogram h;
  for (std::size_t i = 0; i < workload.size(); ++i) {
    std::size_t neighbors = 0;
    for (std::size_t j = 0; j < workload.size(); ++j)
      if (hamming(workload.hash(i), workload.hash(j)) < T) ++neighbors;
    const double m = workload.mass(i);
    if (neighbors <= 1)
      h.exactly_one += m;
    else if (neighbors <= 10)
      h.from_2_to_10 += m;
    else if (neighbors <= 100)
      h.from_11_to_100 += m;
    else
      h.above_100 += m;
  }
  return h;
}

}  // namespace sbb
