#pragma once

#include <span>
#include <vector>

#include "sbb/distribution.hpp"
#include "sbb/embedding.hpp"

namespace sbb {

/// Exact posterior P[F(w) = target | request] for w drawn from the workload
/// distribution, computed over the distribution's support:
///
///   gamma^D(v) (1-gamma)^(d - D(v)) mass(v) / sum over support of the same,
///
/// with D(v) the Hamming distance between the request bits and v restricted
/// to the request's index set. Hashes outside the support have mass zero and
/// contribute nothing; a target outside the support scores 0. Likelihoods
/// are accumulated in log space (log-sum-exp), since gamma^(q d) underflows
/// quickly for repeated queries.
///
/// Requires gamma < 0.5. Throws EmptyInput if the support is empty.
double posterior_single(const CoarseEmbedding& req, const BitVec& target,
                        const HashDistribution& dist, double gamma);

/// Posterior over every support element for one request, aligned with the
/// distribution's support order. Sums to 1 (within floating-point error).
std::vector<double> posterior_vector(const CoarseEmbedding& req,
                                     const HashDistribution& dist, double gamma);

/// Repeated-query posterior: all requests were generated for one image with
/// independent coins. Uses the aggregated exponent sum_j D_j(v) with q*d
/// total coin flips.
double posterior_repeated(std::span<const CoarseEmbedding> reqs, const BitVec& target,
                          const HashDistribution& dist, double gamma);

std::vector<double> posterior_repeated_vector(std::span<const CoarseEmbedding> reqs,
                                              const HashDistribution& dist, double gamma);

}  // namespace sbb
