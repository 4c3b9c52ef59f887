#pragma once

#include <span>
#include <vector>

namespace sbb {

/// One simulated adversary observation: the Bayes posterior assigned to the
/// request and the ground-truth value of the predicate.
struct ScoredRequest {
  double score = 0.0;  // in [0, 1]
  bool label = false;
};

struct PrecisionResult {
  double precision = 0.0;
  double threshold = 0.0;  // predict positive on score >= threshold
};

/// Best precision over all score thresholds subject to recall > rho
/// (recall == 1 exactly when rho == 1). Equal scores are swept as one group,
/// so a threshold can never split ties. Requires at least one positive
/// label; throws EmptyInput otherwise. rho is a fraction in [0, 1].
PrecisionResult precision_at_recall(std::span<const ScoredRequest> scored, double rho);

/// Rank-based AUC advantage 2*AUC - 1, with ties counted as one half
/// (Mann-Whitney). Requires both classes present.
double auc_advantage(std::span<const ScoredRequest> scored);

/// Best single-threshold accuracy, normalized against the majority-class
/// baseline and clamped at zero: max(0, (acc* - base) / (1 - base)).
/// The clamp reflects that an optimal adversary can always play the
/// majority class. Single-class inputs score 0.
double accuracy_advantage(std::span<const ScoredRequest> scored);

}  // namespace sbb
