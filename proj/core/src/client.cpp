#include "sbb/client.hpp"

#include <chrono>

#include "sbb/errors.hpp"
#include "sbb/net.hpp"
#include "sbb/ristretto.hpp"
#include "sbb/sketch.hpp"
#include "sbb/sssp.hpp"

namespace sbb {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

[[noreturn]] void raise_error(const wire::ErrorFrame& e) {
  if (e.code == wire::ErrorCode::bad_version)
    throw VersionMismatch("server rejected version: " + e.message);
  throw Error("server error: " + e.message);
}

}  // namespace

double SessionMetrics::total_millis() const {
  double s = 0;
  for (const auto& p : phases) s += p.millis;
  return s;
}

std::uint64_t SessionMetrics::total_sent() const {
  std::uint64_t s = 0;
  for (const auto& p : phases) s += p.bytes_sent;
  return s;
}

std::uint64_t SessionMetrics::total_received() const {
  std::uint64_t s = 0;
  for (const auto& p : phases) s += p.bytes_received;
  return s;
}

const PhaseMetric* SessionMetrics::phase(const std::string& name) const {
  for (const auto& p : phases)
    if (p.name == name) return &p;
  return nullptr;
}

QueryResult query(const std::string& host, std::uint16_t port, const BitVec& hash,
                  const ClientParams& params, RandomBits& rng) {
  params.embedding.validate();
  QueryResult result;

  // Embed locally.
  auto t0 = Clock::now();
  CoarseEmbedding emb;
  if (params.deterministic_key) {
    emb = emb_lsh_deterministic(hash, params.embedding, *params.deterministic_key);
  } else {
    emb = emb_lsh(hash, params.embedding, rng);
  }
  result.metrics.phases.push_back({"embed", ms_since(t0), 0, 0});

  // Coarse round trip: request out, first response in.
  t0 = Clock::now();
  auto stream = net::Stream::connect(host, port);
  wire::SbbRequest req{params.mode, emb.index_set, emb.bits};
  const auto req_payload = wire::encode_request(req);
  stream.write_frame(req_payload);
  const auto resp_payload = stream.read_frame(wire::kMaxPayload);
  const auto resp = wire::decode_server_payload(resp_payload);
  if (resp.status == 0xff) raise_error(resp.error);
  PhaseMetric coarse{"coarse", ms_since(t0), req_payload.size(),
                     wire::body_bytes(resp_payload, true)};
  result.metrics.phases.push_back(coarse);

  if (params.mode == wire::Mode::retrieval) {
    if (resp.status != 0x00) throw Error("client: expected bucket response");
    t0 = Clock::now();
    bool match = false;
    for (const auto& h : resp.bucket.hashes)
      if (hamming(hash, h) < params.T) {
        match = true;
        break;
      }
    result.match = match;
    result.bucket_size = resp.bucket.hashes.size();
    result.metrics.phases.push_back({"resolve", ms_since(t0), 0, 0});
    return result;
  }

  // Sketch mode.
  if (resp.status != 0x01) throw Error("client: expected sketch message");
  t0 = Clock::now();
  const auto code = SketchCode::reed_muller(8);
  const auto tau = Ristretto255::random_scalar(rng);
  auto round = sssp_client_start<Ristretto255>(resp.sssp1.sketches, hash, tau, code, rng);

  wire::SsspMsg2 msg2{round.blinded};
  const auto msg2_payload = wire::encode_sssp2(msg2);
  stream.write_frame(msg2_payload);
  const auto msg3_payload = stream.read_frame(wire::kMaxPayload);
  const auto msg3 = wire::decode_server_payload(msg3_payload);
  if (msg3.status == 0xff) raise_error(msg3.error);
  if (msg3.status != 0x02) throw Error("client: expected evaluated elements");

  std::vector<Ristretto255::Element> evaluated;
  evaluated.reserve(msg3.sssp3.elements.size());
  for (const auto& e : msg3.sssp3.elements) evaluated.push_back(Ristretto255::decode(e));
  result.match = sssp_client_finish<Ristretto255>(round, evaluated, resp.sssp1.tokens);
  result.bucket_size = resp.sssp1.sketches.size();
  result.metrics.phases.push_back({"resolve", ms_since(t0), wire::body_bytes(msg2_payload, false),
                                   wire::body_bytes(msg3_payload, true)});
  return result;
}

}  // namespace sbb
