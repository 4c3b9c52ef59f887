#include "sbb/analysis.hpp"

#include <cmath>

#include "sbb/errors.hpp"

namespace sbb {

double correctness_bound(const CorrectnessBoundInput& in) {
  if (!(in.beta > 1.0)) throw BoundInapplicable("bound: beta must exceed 1");
  if (in.d == 0 || in.d > in.ell || in.k > in.d)
    throw BoundInapplicable("bound: invalid d/k relationship");
  const double ell = in.ell;
  const double crossover = (in.T + in.beta * ell * in.gamma) / ell;
  if (!(in.k > in.d * crossover))
    throw BoundInapplicable("bound: requires k > d (T + beta ell gamma) / ell");
  const double f1 =
      1.0 - std::exp(-2.0 * ell * (in.beta - 1.0) * (in.beta - 1.0) * in.gamma * in.gamma);
  const double gap = static_cast<double>(in.k) / in.d - crossover;
  const double f2 = 1.0 - std::exp(-2.0 * in.d * gap * gap);
  return f1 * f2;
}

double empirical_correctness(std::span<const std::pair<BitVec, BitVec>> pairs,
                             const EmbeddingParams& params, std::uint32_t trials,
                             RandomBits& rng) {
  params.validate();
  if (pairs.empty()) throw EmptyInput("empirical_correctness: no pairs");
  std::uint64_t hits = 0, total = 0;
  for (std::uint32_t t = 0; t < trials; ++t) {
    for (const auto& [w, w_prime] : pairs) {
      const auto req = emb_lsh(w, params, rng);
      if (restricted_distance(req, w_prime) <= params.k) ++hits;
      ++total;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

double compression_rate(const HashDistribution& workload, std::span<const BitVec> db,
                        const EmbeddingParams& params, std::uint32_t trials,
                        RandomBits& rng) {
  params.validate();
  if (db.empty()) throw EmptyInput("compression_rate: empty database");
  double acc = 0.0;
  for (std::uint32_t t = 0; t < trials; ++t) {
    const auto& v = workload.hash(workload.sample(rng));
    const auto req = emb_lsh(v, params, rng);
    const auto bucket = sim_lsh(req, db, params.k);
    acc += static_cast<double>(bucket.size()) / static_cast<double>(db.size());
  }
  return acc / trials;
}

}  // namespace sbb
