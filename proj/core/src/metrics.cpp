#include "sbb/metrics.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "sbb/errors.hpp"

namespace sbb {

namespace {

struct ScoreGroup {
  double score;
  std::size_t positives;
  std::size_t total;
};

// Distinct scores in descending order with per-group label counts.
std::vector<ScoreGroup> group_by_score(std::span<const ScoredRequest> scored) {
  std::vector<ScoredRequest> sorted(scored.begin(), scored.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredRequest& a, const ScoredRequest& b) { return a.score > b.score; });
  std::vector<ScoreGroup> groups;
  for (const auto& s : sorted) {
    if (groups.empty() || groups.back().score != s.score)
      groups.push_back({s.score, 0, 0});
    groups.back().total += 1;
    groups.back().positives += s.label ? 1 : 0;
  }
  return groups;
}

}  // namespace

PrecisionResult precision_at_recall(std::span<const ScoredRequest> scored, double rho) {
  if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("precision: rho in [0,1]");
  std::size_t npos = 0;
  for (const auto& s : scored) npos += s.label ? 1 : 0;
  if (npos == 0) throw EmptyInput("precision: no positive labels");

  const auto groups = group_by_score(scored);
  PrecisionResult best{-1.0, 0.0};
  std::size_t tp = 0, predicted = 0;
  for (const auto& g : groups) {
    tp += g.positives;
    predicted += g.total;
    const double recall = static_cast<double>(tp) / static_cast<double>(npos);
    const bool feasible = (rho == 1.0) ? (recall == 1.0) : (recall > rho);
    if (!feasible) continue;
    const double precision = static_cast<double>(tp) / static_cast<double>(predicted);
    if (precision > best.precision) best = {precision, g.score};
  }
  // Some feasible threshold always exists: predicting on every request
  // reaches recall 1.
  return best;
}

double auc_advantage(std::span<const ScoredRequest> scored) {
  std::size_t npos = 0, nneg = 0;
  for (const auto& s : scored) (s.label ? npos : nneg) += 1;
  if (npos == 0 || nneg == 0) throw EmptyInput("auc: need both classes");

  // Mann-Whitney via average ranks; groups of equal scores share a rank.
  const auto groups = group_by_score(scored);  // descending
  double rank_sum_pos = 0.0;
  std::size_t higher = 0;  // items ranked above this group (descending order)
  for (const auto& g : groups) {
    // Ascending ranks: the group occupies positions
    // [n - higher - total + 1, n - higher]; average them.
    const double n = static_cast<double>(scored.size());
    const double avg_rank = n - static_cast<double>(higher) -
                            (static_cast<double>(g.total) - 1.0) / 2.0;
    rank_sum_pos += avg_rank * static_cast<double>(g.positives);
    higher += g.total;
  }
  const double np = static_cast<double>(npos), nn = static_cast<double>(nneg);
  const double auc = (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
  return 2.0 * auc - 1.0;
}

double accuracy_advantage(std::span<const ScoredRequest> scored) {
  if (scored.empty()) throw EmptyInput("accuracy: empty input");
  std::size_t npos = 0;
  for (const auto& s : scored) npos += s.label ? 1 : 0;
  const std::size_t n = scored.size();
  const std::size_t nneg = n - npos;

  const double base =
      static_cast<double>(std::max(npos, nneg)) / static_cast<double>(n);
  if (base == 1.0) return 0.0;

  // Sweep thresholds; the empty prefix is the all-negative prediction.
  const auto groups = group_by_score(scored);
  std::size_t tp = 0, predicted = 0;
  std::size_t best_correct = nneg;  // predict everything negative
  for (const auto& g : groups) {
    tp += g.positives;
    predicted += g.total;
    const std::size_t fp = predicted - tp;
    const std::size_t correct = tp + (nneg - fp);
    best_correct = std::max(best_correct, correct);
  }
  const double acc = static_cast<double>(best_correct) / static_cast<double>(n);
  return std::max(0.0, (acc - base) / (1.0 - base));
}

}  // namespace sbb
