#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sbb/distribution.hpp"
#include "sbb/errors.hpp"
#include "sbb/metrics.hpp"
#include "sbb/posterior.hpp"
#include "sbb/rng.hpp"
#include "sbb/simulation.hpp"

using namespace sbb;

namespace {

BitVec bits_of(std::uint32_t value, std::uint32_t nbits) {
  BitVec v(nbits);
  for (std::uint32_t i = 0; i < nbits; ++i)
    if ((value >> i) & 1u) v.set(i, true);
  return v;
}

// Direct-space Bayes computation: plain products over the support, no logs,
// no shared code with the production path.
double oracle_posterior(const std::vector<CoarseEmbedding>& reqs, const BitVec& target,
                        const HashDistribution& dist, double gamma) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const auto& v = dist.hash(i);
    double lik = dist.mass(i);
    for (const auto& r : reqs)
      for (std::uint32_t j = 0; j < r.index_set.size(); ++j) {
        const bool differ = r.bits.get(j) != v.get(r.index_set.indices[j]);
        lik *= differ ? gamma : (1.0 - gamma);
      }
    den += lik;
    if (v == target) num = lik;
  }
  return den > 0 ? num / den : 0.0;
}

HashDistribution random_distribution(std::uint32_t nbits, std::size_t support,
                                     RandomBits& rng, bool full_cube = false) {
  std::vector<std::pair<BitVec, std::uint64_t>> counts;
  if (full_cube) {
    for (std::uint32_t x = 0; x < (1u << nbits); ++x)
      counts.emplace_back(bits_of(x, nbits), 1 + rng.uniform_below(1000));
  } else {
    std::vector<bool> used(1u << nbits, false);
    while (counts.size() < support) {
      const auto x = static_cast<std::uint32_t>(rng.uniform_below(1u << nbits));
      if (used[x]) continue;
      used[x] = true;
      counts.emplace_back(bits_of(x, nbits), 1 + rng.uniform_below(1000));
    }
  }
  return HashDistribution::from_counts(counts);
}

CoarseEmbedding embed_of(const BitVec& hash, std::uint32_t d, double gamma,
                         RandomBits& rng) {
  return emb_lsh(hash, {d, gamma, 0, hash.size()}, rng);
}

}  // namespace

TEST_CASE("induced distribution normalizes counts") {
  SeededRng rng(1);
  const auto a = BitVec::random(256, rng);
  const auto b = BitVec::random(256, rng);

  std::vector<std::pair<BitVec, std::uint64_t>> single{{a, 7}};
  const auto one = HashDistribution::from_counts(single);
  CHECK(one.mass_of(a) == 1.0);

  std::vector<std::pair<BitVec, std::uint64_t>> two{{a, 1}, {b, 3}};
  const auto d = HashDistribution::from_counts(two);
  CHECK(d.mass_of(a) == doctest::Approx(0.25));
  CHECK(d.mass_of(b) == doctest::Approx(0.75));

  std::vector<std::pair<BitVec, std::uint64_t>> big;
  for (int i = 0; i < 5000; ++i)
    big.emplace_back(BitVec::random(256, rng), 1 + rng.uniform_below(1000));
  CHECK(HashDistribution::from_counts(big).total_mass() == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(HashDistribution::from_counts({}), EmptyInput);
  std::vector<std::pair<BitVec, std::uint64_t>> zero{{a, 0}};
  CHECK_THROWS(HashDistribution::from_counts(zero));
}

TEST_CASE("posterior: two-element hand examples") {
  // support {0000, 1111} with equal mass, indices {0,1}, request bits 00
  std::vector<std::pair<BitVec, std::uint64_t>> counts{{bits_of(0b0000, 4), 1},
                                                       {bits_of(0b1111, 4), 1}};
  const auto dist = HashDistribution::from_counts(counts);
  CoarseEmbedding req;
  req.index_set.indices = {0, 1};
  req.bits = BitVec(2);  // 00

  // gamma = 0: only 0000 is consistent
  CHECK(posterior_single(req, bits_of(0b0000, 4), dist, 0.0) == doctest::Approx(1.0));
  // gamma = 0.25: 0.5625 / (0.5625 + 0.0625) = 0.9
  CHECK(posterior_single(req, bits_of(0b0000, 4), dist, 0.25) == doctest::Approx(0.9));
  // out-of-support target scores zero
  CHECK(posterior_single(req, bits_of(0b0101, 4), dist, 0.25) == 0.0);
}

TEST_CASE("posterior matches the brute-force oracle at ell = 8") {
  SeededRng rng(2);
  const auto dist = random_distribution(8, 20, rng);
  for (int t = 0; t < 500; ++t) {
    const double gamma = 0.4 * rng.unit();
    const auto d = 1 + static_cast<std::uint32_t>(rng.uniform_below(8));
    const auto& source = dist.hash(dist.sample(rng));
    const auto req = embed_of(source, d, gamma, rng);
    const auto& target = dist.hash(rng.uniform_below(dist.size()));
    const double got = posterior_single(req, target, dist, gamma);
    const double want = oracle_posterior({req}, target, dist, gamma);
    REQUIRE(std::abs(got - want) < 1e-12);
  }
}

TEST_CASE("posterior vector sums to one") {
  SeededRng rng(3);
  const auto dist = random_distribution(8, 64, rng);
  for (int t = 0; t < 200; ++t) {
    const double gamma = 0.49 * rng.unit();
    const auto req = embed_of(dist.hash(dist.sample(rng)), 5, gamma, rng);
    const auto post = posterior_vector(req, dist, gamma);
    double sum = 0;
    for (double p : post) sum += p;
    REQUIRE(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("repeated posterior: q = 1 reduces to the single-query form") {
  SeededRng rng(4);
  const auto dist = random_distribution(8, 30, rng);
  for (int t = 0; t < 100; ++t) {
    const double gamma = 0.3 * rng.unit();
    const auto req = embed_of(dist.hash(dist.sample(rng)), 4, gamma, rng);
    const auto& target = dist.hash(rng.uniform_below(dist.size()));
    CHECK(posterior_repeated(std::vector<CoarseEmbedding>{req}, target, dist, gamma) ==
          doctest::Approx(posterior_single(req, target, dist, gamma)).epsilon(1e-12));
  }
}

TEST_CASE("repeated posterior matches the oracle for q in {2, 3}") {
  SeededRng rng(5);
  const auto dist = random_distribution(8, 24, rng);
  for (int t = 0; t < 200; ++t) {
    const double gamma = 0.02 + 0.38 * rng.unit();
    const auto& source = dist.hash(dist.sample(rng));
    std::vector<CoarseEmbedding> reqs;
    const int q = 2 + (t % 2);
    for (int j = 0; j < q; ++j) reqs.push_back(embed_of(source, 5, gamma, rng));
    const auto& target = dist.hash(rng.uniform_below(dist.size()));
    const double got = posterior_repeated(reqs, target, dist, gamma);
    const double want = oracle_posterior(reqs, target, dist, gamma);
    REQUIRE(std::abs(got - want) < 1e-12);
  }
}

TEST_CASE("repeated posterior, gamma 0: equals single query on the union index set") {
  // Two-element support; with consistent noiseless requests the posterior
  // collapses to the restriction on the union of sampled indices.
  std::vector<std::pair<BitVec, std::uint64_t>> counts{{bits_of(0b00000000, 8), 2},
                                                       {bits_of(0b11110000, 8), 3}};
  const auto dist = HashDistribution::from_counts(counts);
  const auto target = bits_of(0b00000000, 8);

  // Indices {0,1,2,3} are zero in both candidates: the union-restricted
  // posterior is just the prior mass ratio.
  CoarseEmbedding r1, r2;
  r1.index_set.indices = {0, 1};
  r1.bits = BitVec(2);
  r2.index_set.indices = {2, 3};
  r2.bits = BitVec(2);
  std::vector<CoarseEmbedding> reqs{r1, r2};

  CoarseEmbedding un;
  un.index_set.indices = {0, 1, 2, 3};
  un.bits = BitVec(4);

  CHECK(posterior_repeated(reqs, target, dist, 0.0) ==
        doctest::Approx(posterior_single(un, target, dist, 0.0)).epsilon(1e-12));
  CHECK(posterior_repeated(reqs, target, dist, 0.0) == doctest::Approx(2.0 / 5.0));

  // Index 4 is set in 11110000 (bit order is LSB-first within the value),
  // so adding it pins the posterior to the remaining candidate.
  CoarseEmbedding r3;
  r3.index_set.indices = {4};
  r3.bits = BitVec(1);
  std::vector<CoarseEmbedding> pinned{r1, r2, r3};
  CHECK(posterior_repeated(pinned, target, dist, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("monotone information: gamma 0, nested index sets") {
  SeededRng rng(6);
  const auto dist = random_distribution(8, 40, rng);
  for (int t = 0; t < 200; ++t) {
    const auto& truth = dist.hash(dist.sample(rng));
    auto I2 = sample_index_set(8, 6, rng);
    CoarseEmbedding big;
    big.index_set = I2;
    big.bits = restrict_bits(truth, I2);
    CoarseEmbedding small;
    small.index_set.indices.assign(I2.indices.begin(), I2.indices.begin() + 3);
    small.bits = restrict_bits(truth, small.index_set);
    CHECK(posterior_single(big, truth, dist, 0.0) >=
          posterior_single(small, truth, dist, 0.0) - 1e-12);
  }
}

TEST_CASE("precision at recall: hand-built list equals the threshold-sweep oracle") {
  // scores: .9(+) .8(-) .8(+) .6(+) .5(-) .4(+)
  std::vector<ScoredRequest> scored{{0.9, true}, {0.8, false}, {0.8, true},
                                    {0.6, true}, {0.5, false}, {0.4, true}};
  auto oracle = [&scored](double rho) {
    double best = -1;
    std::vector<double> thresholds{1.1, 0.9, 0.8, 0.6, 0.5, 0.4, 0.0};
    for (double th : thresholds) {
      int tp = 0, fp = 0, fn = 0;
      for (const auto& s : scored) {
        const bool pred = s.score >= th;
        tp += pred && s.label;
        fp += pred && !s.label;
        fn += !pred && s.label;
      }
      if (tp + fn == 0 || tp + fp == 0) continue;
      const double recall = static_cast<double>(tp) / (tp + fn);
      const bool ok = rho == 1.0 ? recall == 1.0 : recall > rho;
      if (ok) best = std::max(best, static_cast<double>(tp) / (tp + fp));
    }
    return best;
  };
  for (double rho : {0.0, 0.25, 0.5, 0.75, 1.0})
    CHECK(precision_at_recall(scored, rho).precision == doctest::Approx(oracle(rho)));

  CHECK(precision_at_recall(scored, 0.0).precision == doctest::Approx(1.0));
  CHECK(precision_at_recall(scored, 1.0).precision == doctest::Approx(4.0 / 6.0));

  std::vector<ScoredRequest> negatives{{0.4, false}, {0.2, false}};
  CHECK_THROWS_AS(precision_at_recall(negatives, 0.5), EmptyInput);
}

TEST_CASE("precision is nonincreasing in rho; perfect separation is flat 1.0") {
  std::vector<ScoredRequest> separated{{0.9, true}, {0.8, true}, {0.2, false}, {0.1, false}};
  double prev = 2.0;
  for (double rho : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const double p = precision_at_recall(separated, rho).precision;
    CHECK(p == doctest::Approx(1.0));
    CHECK(p <= prev + 1e-12);
    prev = p;
  }

  SeededRng rng(7);
  std::vector<ScoredRequest> noisy;
  for (int i = 0; i < 500; ++i) noisy.push_back({rng.unit(), rng.bernoulli(0.2)});
  prev = 2.0;
  for (double rho : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const double p = precision_at_recall(noisy, rho).precision;
    CHECK(p <= prev + 1e-12);
    prev = p;
  }
}

TEST_CASE("auc: perfect, null, oracle, and monotone-transform invariance") {
  std::vector<ScoredRequest> perfect{{0.9, true}, {0.8, true}, {0.3, false}, {0.1, false}};
  CHECK(auc_advantage(perfect) == doctest::Approx(1.0));

  SeededRng rng(8);
  std::vector<ScoredRequest> null_case;
  for (int i = 0; i < 20000; ++i) null_case.push_back({rng.unit(), rng.bernoulli(0.3)});
  // eps_auc ~ 0 within 3 sigma of the Mann-Whitney null
  const std::size_t np = static_cast<std::size_t>(
      std::count_if(null_case.begin(), null_case.end(), [](auto& s) { return s.label; }));
  const std::size_t nn = null_case.size() - np;
  const double sigma_auc =
      std::sqrt((np + nn + 1.0) / (12.0 * static_cast<double>(np) * nn));
  CHECK(std::abs(auc_advantage(null_case)) < 3 * 2 * sigma_auc);

  // 8-element list vs the O(n^2) pairwise oracle, ties counted half.
  std::vector<ScoredRequest> small{{0.9, true},  {0.7, false}, {0.7, true},  {0.7, false},
                                   {0.5, true},  {0.3, false}, {0.3, true},  {0.1, false}};
  double wins = 0;
  std::size_t pairs = 0;
  for (const auto& p : small)
    for (const auto& n : small) {
      if (!p.label || n.label) continue;
      ++pairs;
      if (p.score > n.score) wins += 1;
      else if (p.score == n.score) wins += 0.5;
    }
  CHECK(auc_advantage(small) ==
        doctest::Approx(2.0 * wins / static_cast<double>(pairs) - 1.0).epsilon(1e-12));

  // invariant under strictly increasing transforms
  auto squash = small;
  for (auto& s : squash) s.score = 1.0 / (1.0 + std::exp(-7.0 * s.score));
  CHECK(auc_advantage(squash) == doctest::Approx(auc_advantage(small)).epsilon(1e-12));

  std::vector<ScoredRequest> single{{0.5, true}};
  CHECK_THROWS_AS(auc_advantage(single), EmptyInput);
}

TEST_CASE("accuracy advantage: exact scores, constants, oracle") {
  std::vector<ScoredRequest> exact{{1.0, true}, {1.0, true}, {0.0, false}, {0.0, false},
                                   {0.0, false}};
  CHECK(accuracy_advantage(exact) == doctest::Approx(1.0));

  std::vector<ScoredRequest> constant{{0.5, true}, {0.5, false}, {0.5, false}, {0.5, true},
                                      {0.5, false}};
  CHECK(accuracy_advantage(constant) == doctest::Approx(0.0));

  std::vector<ScoredRequest> six{{0.9, true}, {0.8, false}, {0.7, true},
                                 {0.6, true}, {0.2, false}, {0.1, false}};
  // oracle sweep over all prefixes
  double best = 3.0 / 6.0;  // all-negative baseline: 3 correct
  std::vector<double> thresholds{0.9, 0.8, 0.7, 0.6, 0.2, 0.1};
  for (double th : thresholds) {
    int correct = 0;
    for (const auto& s : six) correct += ((s.score >= th) == s.label);
    best = std::max(best, correct / 6.0);
  }
  const double base = 0.5;
  CHECK(accuracy_advantage(six) == doctest::Approx(std::max(0.0, (best - base) / (1 - base))));
}

TEST_CASE("matching simulation: labels, full-information limit, oracle recomputation") {
  SeededRng rng(9);
  const auto dist = random_distribution(8, 16, rng);

  // target outside the workload: all labels false
  BitVec outside;
  for (std::uint32_t x = 0; x < 256; ++x) {
    outside = bits_of(x, 8);
    if (!dist.find(outside)) break;
  }
  const auto scored_out = run_matching_simulation(dist, outside, {4, 0.1, 0, 8},
                                                  RepetitionConfig{}, 300, rng);
  for (const auto& s : scored_out) {
    CHECK_FALSE(s.label);
    CHECK(s.score == 0.0);
  }

  // gamma = 0, d = ell: scores are exactly 1.0 on true matches
  const auto& target = dist.hash(0);
  const auto scored_full = run_matching_simulation(dist, target, {8, 0.0, 0, 8},
                                                   RepetitionConfig{}, 500, rng);
  bool saw_match = false;
  for (const auto& s : scored_full)
    if (s.label) {
      saw_match = true;
      CHECK(s.score == doctest::Approx(1.0));
    }
  CHECK(saw_match);

  // independent reimplementation of the scorer at ell = 8
  SeededRng sim_rng(10), oracle_rng(10);
  const EmbeddingParams params{5, 0.15, 0, 8};
  const auto scored = run_matching_simulation(dist, target, params, RepetitionConfig{},
                                              400, sim_rng);
  const auto batch_I = sample_index_set(8, 5, oracle_rng);
  // Re-drive the oracle with the same stream: sample, restrict, flip.
  for (std::size_t t = 0; t < scored.size(); ++t) {
    const auto& v = dist.hash(dist.sample(oracle_rng));
    CoarseEmbedding e;
    e.index_set = batch_I;
    e.bits = flip_bits(restrict_bits(v, batch_I), params.gamma, oracle_rng);
    REQUIRE(std::abs(scored[t].score - oracle_posterior({e}, target, dist, params.gamma)) <
            1e-12);
    REQUIRE(scored[t].label == (v == target));
  }
}

TEST_CASE("deterministic repetition never grows information; fresh coins concentrate") {
  SeededRng rng(11);
  const auto dist = random_distribution(8, 12, rng);
  const auto& target = dist.hash(1);
  const EmbeddingParams params{4, 0.25, 0, 8};

  RepetitionConfig det;
  det.q = 5;
  det.mode = RepetitionMode::deterministic;
  det.prf_key = derive_key(42, "test/det");

  SeededRng rng_a(12), rng_b(12);
  const auto det5 = run_matching_simulation(dist, target, params, det, 300, rng_a);
  det.q = 1;
  const auto det1 = run_matching_simulation(dist, target, params, det, 300, rng_b);
  // q identical replayed embeddings carry exactly one query's worth: the
  // scores coincide pointwise (same drawn hashes under the same stream).
  REQUIRE(det5.size() == det1.size());
  for (std::size_t i = 0; i < det5.size(); ++i)
    CHECK(det5[i].score == doctest::Approx(det1[i].score).epsilon(1e-12));

  // Independent coins: repeated queries sharpen the posterior of the truth.
  RepetitionConfig ind;
  ind.mode = RepetitionMode::independent;
  double mean_q1 = 0, mean_q3 = 0;
  int n1 = 0, n3 = 0;
  SeededRng rng_c(13);
  ind.q = 1;
  for (const auto& s :
       run_matching_simulation(dist, target, params, ind, 2000, rng_c))
    if (s.label) {
      mean_q1 += s.score;
      ++n1;
    }
  ind.q = 3;
  for (const auto& s :
       run_matching_simulation(dist, target, params, ind, 2000, rng_c))
    if (s.label) {
      mean_q3 += s.score;
      ++n3;
    }
  REQUIRE(n1 > 0);
  REQUIRE(n3 > 0);
  CHECK(mean_q3 / n3 > mean_q1 / n1);
}

TEST_CASE("neighborhood distribution: trivial shapes and the quadratic oracle") {
  SeededRng rng(14);

  // many copies of one hash: by construction a single support element
  std::vector<std::pair<BitVec, std::uint64_t>> mono{{BitVec::random(256, rng), 500}};
  const auto h1 = neighborhood_distribution(HashDistribution::from_counts(mono), 32);
  CHECK(h1.exactly_one == doctest::Approx(1.0));

  // far-apart hashes at T = 1: everyone alone
  std::vector<std::pair<BitVec, std::uint64_t>> spread;
  for (int i = 0; i < 30; ++i) spread.emplace_back(BitVec::random(256, rng), 1);
  const auto h2 = neighborhood_distribution(HashDistribution::from_counts(spread), 1);
  CHECK(h2.exactly_one == doctest::Approx(1.0));

  // clustered synthetic workload vs direct O(n^2) recomputation
  std::vector<std::pair<BitVec, std::uint64_t>> clustered;
  for (int c = 0; c < 6; ++c) {
    const auto center = BitVec::random(256, rng);
    for (int m = 0; m < 5; ++m) {
      auto member = center;
      for (int f = 0; f < m; ++f) member.toggle(static_cast<std::uint32_t>(rng.uniform_below(256)));
      clustered.emplace_back(member, 1 + rng.uniform_below(20));
    }
  }
  const auto dist = HashDistribution::from_counts(clustered);
  const auto got = neighborhood_distribution(dist, 32);
  double b1 = 0, b2 = 0, b3 = 0, b4 = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    std::size_t n = 0;
    for (std::size_t j = 0; j < dist.size(); ++j)
      n += hamming(dist.hash(i), dist.hash(j)) < 32;
    (n <= 1 ? b1 : n <= 10 ? b2 : n <= 100 ? b3 : b4) += dist.mass(i);
  }
  CHECK(got.exactly_one == doctest::Approx(b1));
  CHECK(got.from_2_to_10 == doctest::Approx(b2));
  CHECK(got.from_11_to_100 == doctest::Approx(b3));
  CHECK(got.above_100 == doctest::Approx(b4));
}
