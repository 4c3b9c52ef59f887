#pragma once

#include <functional>
#include <span>
#include <unordered_set>
#include <vector>

#include "sbb/bitvec.hpp"
#include "sbb/errors.hpp"
#include "sbb/oprf.hpp"
#include "sbb/rng.hpp"
#include "sbb/sketch.hpp"

namespace sbb {

/// First server message of the sketch-based similarity protocol: one sketch
/// and one precomputed PRF token per bucket member, order-aligned.
template <class G>
struct SsspServerBundle {
  std::vector<BitVec> sketches;
  std::vector<OprfOutput> tokens;
};

template <class G>
SsspServerBundle<G> sssp_server_prepare(std::span<const BitVec> bucket,
                                        const typename G::Scalar& key,
                                        const SketchCode& code) {
  SsspServerBundle<G> out;
  out.sketches.reserve(bucket.size());
  out.tokens.reserve(bucket.size());
  for (const auto& h : bucket) {
    out.sketches.push_back(code.sketch(h));
    const auto bytes = h.to_bytes();
    out.tokens.push_back(oprf_direct<G>(bytes, key));
  }
  return out;
}

/// Client state between the blinded request and the evaluated response.
template <class G>
struct SsspClientRound {
  std::vector<typename G::Element> blinded;  // one per bucket slot
  std::vector<BitVec> recovered;             // candidate value per real slot
  std::vector<bool> real;                    // false for dummy slots
  typename G::Scalar tau;
};

/// Runs Rec on every sketch and blinds the recovered candidates under tau.
/// Failed recoveries and repeats of an already-recovered value are replaced
/// by fresh random elements, so the request length and shape never depend
/// on decode outcomes.
template <class G>
SsspClientRound<G> sssp_client_start(std::span<const BitVec> sketches, const BitVec& v,
                                     const typename G::Scalar& tau,
                                     const SketchCode& code, RandomBits& rng) {
  SsspClientRound<G> round;
  round.tau = tau;
  std::unordered_set<BitVec, BitVecHash> seen;
  for (const auto& z : sketches) {
    const auto rec = code.recover(z, v);
    const bool fresh = rec.ok && seen.insert(rec.value).second;
    round.real.push_back(fresh);
    round.recovered.push_back(rec.value);
    if (fresh) {
      const auto bytes = rec.value.to_bytes();
      round.blinded.push_back(oprf_blind<G>(bytes, tau));
    } else {
      round.blinded.push_back(G::random_element(rng));
    }
  }
  return round;
}

/// Server step on the second message: evaluate every blinded element.
template <class G>
std::vector<typename G::Element> sssp_server_evaluate(
    std::span<const typename G::Element> blinded, const typename G::Scalar& key) {
  std::vector<typename G::Element> out;
  out.reserve(blinded.size());
  for (const auto& x : blinded) out.push_back(oprf_evaluate<G>(x, key));
  return out;
}

/// Unblind the evaluated elements and decide the match: true iff some real
/// slot's finalized output equals one of the first-message tokens. The
/// comparison is global because distinct sketches can recover the same
/// candidate value, which then answers for every slot it was deduplicated
/// from.
template <class G>
bool sssp_client_finish(const SsspClientRound<G>& round,
                        std::span<const typename G::Element> evaluated,
                        std::span<const OprfOutput> tokens) {
  if (evaluated.size() != round.blinded.size())
    throw LengthMismatch("sssp: evaluated count mismatch");
  struct ArrayHash {
    std::size_t operator()(const OprfOutput& a) const {
      std::size_t h = 1469598103934665603ull;
      for (auto b : a) h = (h ^ b) * 1099511628211ull;
      return h;
    }
  };
  std::unordered_set<OprfOutput, ArrayHash> token_set(tokens.begin(), tokens.end());
  const auto tau_inv = G::invert(round.tau);
  for (std::size_t i = 0; i < evaluated.size(); ++i) {
    if (!round.real[i]) continue;
    const auto y = G::pow(evaluated[i], tau_inv);
    const auto bytes = round.recovered[i].to_bytes();
    if (token_set.contains(oprf_finalize_bytes(bytes, G::encode(y)))) return true;
  }
  return false;
}

/// Whole client flow against an abstract evaluator (in-process server or a
/// network round trip).
template <class G>
bool sssp_client_round(std::span<const BitVec> sketches, std::span<const OprfOutput> tokens,
                       const BitVec& v, const typename G::Scalar& tau,
                       const SketchCode& code,
                       const std::function<std::vector<typename G::Element>(
                           std::span<const typename G::Element>)>& evaluator,
                       RandomBits& rng) {
  if (sketches.size() != tokens.size())
    throw LengthMismatch("sssp: sketches/tokens count mismatch");
  auto round = sssp_client_start<G>(sketches, v, tau, code, rng);
  const auto evaluated = evaluator(round.blinded);
  return sssp_client_finish<G>(round, evaluated, tokens);
}

}  // namespace sbb
