#include "sbb/workload.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "sbb/embedding.hpp"
#include "sbb/errors.hpp"
#include "sbb/rng.hpp"

namespace sbb {

namespace {

std::uint64_t parse_count(const std::string& s) {
  if (s.empty()) throw ParseError("workload: empty count");
  std::uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw ParseError("workload: bad count: " + s);
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  if (v == 0) throw ParseError("workload: counts must be positive");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Minimal extraction for the fixed one-line JSONL shape written by
// write_workload_jsonl.
std::string json_string_field(const std::string& line, const std::string& key) {
  const auto kpos = line.find("\"" + key + "\"");
  if (kpos == std::string::npos) throw ParseError("workload: missing field " + key);
  auto pos = line.find(':', kpos);
  if (pos == std::string::npos) throw ParseError("workload: malformed JSONL");
  ++pos;
  while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
  if (pos < line.size() && line[pos] == '"') {
    const auto end = line.find('"', pos + 1);
    if (end == std::string::npos) throw ParseError("workload: malformed JSONL string");
    return line.substr(pos + 1, end - pos - 1);
  }
  auto end = pos;
  while (end < line.size() && (std::isdigit(static_cast<unsigned char>(line[end])))) ++end;
  if (end == pos) throw ParseError("workload: malformed JSONL number");
  return line.substr(pos, end - pos);
}

}  // namespace

std::vector<WorkloadRecord> read_workload(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("workload: cannot open " + path);
  const bool jsonl = path.size() >= 6 && path.substr(path.size() - 6) == ".jsonl";
  std::vector<WorkloadRecord> out;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (jsonl) {
      out.push_back({BitVec::from_hex(json_string_field(line, "hash"), 256),
                     parse_count(json_string_field(line, "count"))});
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("workload: expected hash,count");
    const auto h = trim(line.substr(0, comma));
    const auto c = trim(line.substr(comma + 1));
    if (first && h == "hash") {
      first = false;
      continue;  // header row
    }
    first = false;
    out.push_back({BitVec::from_hex(h, 256), parse_count(c)});
  }
  if (out.empty()) throw EmptyInput("workload: no records in " + path);
  return out;
}

void write_workload_csv(std::ostream& out, const std::vector<WorkloadRecord>& records) {
  out << "hash,count\n";
  for (const auto& r : records) out << r.hash.to_hex() << "," << r.count << "\n";
}

void write_workload_jsonl(std::ostream& out, const std::vector<WorkloadRecord>& records) {
  for (const auto& r : records)
    out << "{\"hash\": \"" << r.hash.to_hex() << "\", \"count\": " << r.count << "}\n";
}

std::vector<BitVec> read_database(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("database: cannot open " + path);
  std::vector<BitVec> out;
  std::string line;
  while (std::getline(f, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    const auto hex = tab == std::string::npos ? line : line.substr(0, tab);
    out.push_back(BitVec::from_hex(hex, 256));
  }
  if (out.empty()) throw EmptyInput("database: no hashes in " + path);
  return out;
}

void write_database(std::ostream& out, std::span<const BitVec> db) {
  for (const auto& h : db) out << h.to_hex() << "\n";
}

HashDistribution to_distribution(const std::vector<WorkloadRecord>& records) {
  std::vector<std::pair<BitVec, std::uint64_t>> counts;
  counts.reserve(records.size());
  for (const auto& r : records) counts.emplace_back(r.hash, r.count);
  return HashDistribution::from_counts(counts);
}

void SyntheticConfig::validate() const {
  if (num_clusters == 0) throw std::invalid_argument("synthetic: need clusters");
  if (cluster_radius >= 128) throw std::invalid_argument("synthetic: radius < ell/2");
  if (members_min == 0 || members_min > members_max)
    throw std::invalid_argument("synthetic: bad member range");
  if (!(zipf_exponent > 0.0)) throw std::invalid_argument("synthetic: zipf exponent > 0");
  if (num_requests == 0) throw std::invalid_argument("synthetic: need requests");
}

SyntheticData generate_synthetic(const SyntheticConfig& config) {
  config.validate();
  SeededRng rng(derive_seed(config.seed, "synthetic/centers"));

  std::vector<BitVec> members;
  for (std::uint32_t c = 0; c < config.num_clusters; ++c) {
    const BitVec center = BitVec::random(256, rng);
    const auto m = config.members_min +
                   rng.uniform_below(config.members_max - config.members_min + 1);
    for (std::uint64_t i = 0; i < m; ++i) {
      const auto weight = rng.uniform_below(config.cluster_radius + 1);
      const auto err_pos = sample_index_set(256, static_cast<std::uint32_t>(weight), rng);
      BitVec member = center;
      for (auto p : err_pos.indices) member.toggle(p);
      members.push_back(member);
    }
  }

  // Distinct member hashes form the database.
  SyntheticData out;
  std::unordered_set<BitVec, BitVecHash> seen;
  for (const auto& m : members)
    if (seen.insert(m).second) out.database.push_back(m);

  // Zipf popularity over the distinct hashes: shuffle so ranks do not
  // correlate with cluster order, then draw the request stream.
  std::vector<BitVec> ranked = out.database;
  SeededRng shuffle_rng(derive_seed(config.seed, "synthetic/ranks"));
  for (std::size_t i = ranked.size(); i > 1; --i)
    std::swap(ranked[i - 1], ranked[shuffle_rng.uniform_below(i)]);

  std::vector<double> cdf(ranked.size());
  double acc = 0.0;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    acc += std::pow(static_cast<double>(r + 1), -config.zipf_exponent);
    cdf[r] = acc;
  }
  for (auto& v : cdf) v /= acc;
  cdf.back() = 1.0;

  std::vector<std::uint64_t> counts(ranked.size(), 0);
  SeededRng draw_rng(derive_seed(config.seed, "synthetic/requests"));
  for (std::uint64_t q = 0; q < config.num_requests; ++q) {
    const double u = draw_rng.unit();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    counts[static_cast<std::size_t>(it - cdf.begin())] += 1;
  }
  for (std::size_t r = 0; r < ranked.size(); ++r)
    if (counts[r] > 0) out.workload.push_back({ranked[r], counts[r]});
  return out;
}

SyntheticConfig default_synthetic_config() { return SyntheticConfig{}; }

std::vector<std::pair<BitVec, BitVec>> similar_pairs(const HashDistribution& dist,
                                                     std::uint32_t T,
                                                     std::size_t max_pairs) {
  std::vector<std::pair<BitVec, BitVec>> pairs;
  for (std::size_t i = 0; i < dist.size() && pairs.size() < max_pairs; ++i)
    for (std::size_t j = i + 1; j < dist.size() && pairs.size() < max_pairs; ++j)
      if (hamming(dist.hash(i), dist.hash(j)) < T)
        pairs.emplace_back(dist.hash(i), dist.hash(j));
  return pairs;
}

}  // namespace sbb
