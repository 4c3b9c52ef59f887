#include "sbb/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sbb/errors.hpp"

namespace sbb {

HashDistribution HashDistribution::from_counts(
    std::span<const std::pair<BitVec, std::uint64_t>> workload) {
  if (workload.empty()) throw EmptyInput("distribution: empty workload");
  HashDistribution d;
  std::vector<std::uint64_t> counts;
  for (const auto& [h, c] : workload) {
    if (c == 0) throw std::invalid_argument("distribution: counts must be positive");
    auto it = d.index_.find(h);
    if (it == d.index_.end()) {
      d.index_.emplace(h, d.support_.size());
      d.support_.push_back(h);
      counts.push_back(c);
    } else {
      counts[it->second] += c;
    }
  }
  const double total = static_cast<double>(
      std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  d.mass_.resize(counts.size());
  d.log_mass_.resize(counts.size());
  d.cdf_.resize(counts.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    d.mass_[i] = static_cast<double>(counts[i]) / total;
    d.log_mass_[i] = std::log(d.mass_[i]);
    acc += d.mass_[i];
    d.cdf_[i] = acc;
  }
  d.cdf_.back() = 1.0;
  return d;
}

std::optional<std::size_t> HashDistribution::find(const BitVec& v) const {
  auto it = index_.find(v);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double HashDistribution::mass_of(const BitVec& v) const {
  auto i = find(v);
  return i ? mass_[*i] : 0.0;
}

std::size_t HashDistribution::sample(RandomBits& rng) const {
  const double u = rng.unit();
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<std::size_t>(it - cdf_.begin());
}

double HashDistribution::total_mass() const {
  double s = 0.0;
  for (double m : mass_) s += m;
  return s;
}

}  // namespace sbb
