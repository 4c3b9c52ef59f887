#include "sbb/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sbb/errors.hpp"

namespace sbb {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Total restricted distance over all requests: delta(v) = sum_j D_j(v).
std::uint64_t total_restricted_distance(std::span<const CoarseEmbedding> reqs,
                                        const BitVec& v) {
  std::uint64_t delta = 0;
  for (const auto& r : reqs) delta += restricted_distance(r, v);
  return delta;
}

// log( gamma^delta (1-gamma)^(n - delta) ), handling gamma = 0 exactly.
double log_likelihood(std::uint64_t delta, std::uint64_t n, double log_g, double log_1g,
                      double gamma) {
  if (gamma == 0.0) return delta == 0 ? 0.0 : kNegInf;
  return static_cast<double>(delta) * log_g + static_cast<double>(n - delta) * log_1g;
}

std::vector<double> posterior_impl(std::span<const CoarseEmbedding> reqs,
                                   const HashDistribution& dist, double gamma) {
  if (!(gamma >= 0.0) || gamma >= 0.5)
    throw std::invalid_argument("posterior: need 0 <= gamma < 0.5");
  if (dist.size() == 0) throw EmptyInput("posterior: empty support");
  if (reqs.empty()) throw EmptyInput("posterior: no requests");

  std::uint64_t n = 0;
  for (const auto& r : reqs) n += r.index_set.size();
  const double log_g = gamma > 0.0 ? std::log(gamma) : kNegInf;
  const double log_1g = std::log1p(-gamma);

  std::vector<double> logp(dist.size(), kNegInf);
  double max_lp = kNegInf;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const auto delta = total_restricted_distance(reqs, dist.hash(i));
    const double lp = log_likelihood(delta, n, log_g, log_1g, gamma) + dist.log_mass(i);
    logp[i] = lp;
    max_lp = std::max(max_lp, lp);
  }
  if (max_lp == kNegInf)
    throw Error("posterior: zero total likelihood (gamma = 0 with no consistent hash)");

  double z = 0.0;
  for (double lp : logp) z += std::exp(lp - max_lp);
  const double log_z = max_lp + std::log(z);

  std::vector<double> post(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i)
    post[i] = logp[i] == kNegInf ? 0.0 : std::exp(logp[i] - log_z);
  return post;
}

}  // namespace

std::vector<double> posterior_vector(const CoarseEmbedding& req,
                                     const HashDistribution& dist, double gamma) {
  return posterior_impl(std::span(&req, 1), dist, gamma);
}

std::vector<double> posterior_repeated_vector(std::span<const CoarseEmbedding> reqs,
                                              const HashDistribution& dist, double gamma) {
  return posterior_impl(reqs, dist, gamma);
}

double posterior_single(const CoarseEmbedding& req, const BitVec& target,
                        const HashDistribution& dist, double gamma) {
  const auto ix = dist.find(target);
  if (!ix) return 0.0;
  return posterior_vector(req, dist, gamma)[*ix];
}

double posterior_repeated(std::span<const CoarseEmbedding> reqs, const BitVec& target,
                          const HashDistribution& dist, double gamma) {
  const auto ix = dist.find(target);
  if (!ix) return 0.0;
  return posterior_repeated_vector(reqs, dist, gamma)[*ix];
}

}  // namespace sbb
