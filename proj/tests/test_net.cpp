#include <doctest.h>

#include <algorithm>
#include <thread>
#include <vector>

#include "sbb/client.hpp"
#include "sbb/embedding.hpp"
#include "sbb/errors.hpp"
#include "sbb/rng.hpp"
#include "sbb/server.hpp"
#include "sbb/wire.hpp"

using namespace sbb;

namespace {

wire::SbbRequest random_request(RandomBits& rng) {
  wire::SbbRequest r;
  r.mode = rng.bernoulli(0.5) ? wire::Mode::sssp : wire::Mode::retrieval;
  const auto d = 1 + static_cast<std::uint32_t>(rng.uniform_below(256));
  r.indices = sample_index_set(256, d, rng);
  r.bits = BitVec::random(d, rng);
  return r;
}

std::vector<BitVec> random_db(std::size_t n, RandomBits& rng) {
  std::vector<BitVec> db;
  db.reserve(n);
  for (std::size_t i = 0; i < n; ++i) db.push_back(BitVec::random(256, rng));
  return db;
}

}  // namespace

TEST_CASE("wire: request round trip") {
  SeededRng rng(1);
  for (int t = 0; t < 500; ++t) {
    const auto r = random_request(rng);
    const auto back = wire::decode_request(wire::encode_request(r));
    REQUIRE(back.mode == r.mode);
    REQUIRE(back.indices.indices == r.indices.indices);
    REQUIRE(back.bits == r.bits);
  }
}

TEST_CASE("wire: server payload round trips") {
  SeededRng rng(2);
  for (int t = 0; t < 200; ++t) {
    wire::BucketResponse b;
    const auto n = rng.uniform_below(20);
    for (std::uint64_t i = 0; i < n; ++i) b.hashes.push_back(BitVec::random(256, rng));
    const auto back = wire::decode_server_payload(wire::encode_bucket(b));
    REQUIRE(back.status == 0x00);
    REQUIRE(back.bucket.hashes == b.hashes);
  }
  for (int t = 0; t < 200; ++t) {
    wire::SsspMsg1 m;
    const auto n = rng.uniform_below(10);
    for (std::uint64_t i = 0; i < n; ++i) {
      m.sketches.push_back(BitVec::random(247, rng));
      std::array<std::uint8_t, 32> tok{};
      rng.fill(tok);
      m.tokens.push_back(tok);
    }
    const auto back = wire::decode_server_payload(wire::encode_sssp1(m));
    REQUIRE(back.status == 0x01);
    REQUIRE(back.sssp1.sketches == m.sketches);
    REQUIRE(back.sssp1.tokens == m.tokens);
  }
  for (int t = 0; t < 100; ++t) {
    wire::SsspMsg3 m;
    const auto n = rng.uniform_below(10);
    for (std::uint64_t i = 0; i < n; ++i) {
      std::array<std::uint8_t, 32> e{};
      rng.fill(e);
      m.elements.push_back(e);
    }
    const auto back = wire::decode_server_payload(wire::encode_sssp3(m));
    REQUIRE(back.status == 0x02);
    REQUIRE(back.sssp3.elements == m.elements);
  }
  wire::ErrorFrame e{wire::ErrorCode::bad_mode, "nope"};
  const auto back = wire::decode_server_payload(wire::encode_error(e));
  REQUIRE(back.status == 0xff);
  REQUIRE(back.error.code == wire::ErrorCode::bad_mode);
  REQUIRE(back.error.message == "nope");

  wire::SsspMsg2 m2;
  std::array<std::uint8_t, 32> x{};
  rng.fill(x);
  m2.elements.push_back(x);
  REQUIRE(wire::decode_sssp2(wire::encode_sssp2(m2)).elements == m2.elements);
}

TEST_CASE("wire: malformed payloads are rejected, never accepted silently") {
  SeededRng rng(3);
  // targeted cases
  CHECK_THROWS_AS(wire::decode_request({}), ParseError);
  {
    auto p = wire::encode_request(random_request(rng));
    p[0] = 9;  // version
    CHECK_THROWS_AS(wire::decode_request(p), VersionMismatch);
  }
  {
    auto p = wire::encode_request(random_request(rng));
    p[1] = 7;  // mode
    CHECK_THROWS_AS(wire::decode_request(p), ParseError);
  }
  {
    wire::SbbRequest r;
    r.indices.indices = {5, 5};  // duplicate
    r.bits = BitVec(2);
    const auto p = wire::encode_request(r);
    CHECK_THROWS(wire::decode_request(p));
  }
  {
    auto p = wire::encode_request(random_request(rng));
    p.push_back(0);  // trailing byte
    CHECK_THROWS_AS(wire::decode_request(p), ParseError);
  }
  {
    wire::BucketResponse b;
    b.hashes.push_back(BitVec::random(256, rng));
    auto p = wire::encode_bucket(b);
    p[3] = 0xff;  // count lies
    CHECK_THROWS_AS(wire::decode_server_payload(p), ParseError);
  }

  // random mutations of valid frames either decode or throw ParseError;
  // anything else (crash, UB) fails the test by construction
  for (int t = 0; t < 3000; ++t) {
    auto p = wire::encode_request(random_request(rng));
    const auto flips = 1 + rng.uniform_below(8);
    for (std::uint64_t f = 0; f < flips; ++f)
      p[rng.uniform_below(p.size())] ^= static_cast<std::uint8_t>(1 + rng.uniform_below(255));
    try {
      (void)wire::decode_request(p);
    } catch (const ParseError&) {
    } catch (const std::invalid_argument&) {
    }
  }
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::uint8_t> junk(rng.uniform_below(64));
    rng.fill(junk);
    try {
      (void)wire::decode_server_payload(junk);
    } catch (const ParseError&) {
    }
  }
}

TEST_CASE("loopback: empty database answers false with a bare count field") {
  Server server({}, ServerOptions{.k = 2});
  server.start("127.0.0.1", 0);
  SeededRng rng(4);
  ClientParams params;
  params.embedding = {9, 0.05, 2, 256};
  const auto res = query("127.0.0.1", server.port(), BitVec::random(256, rng), params, rng);
  CHECK_FALSE(res.match);
  CHECK(res.bucket_size == 0);
  CHECK(res.metrics.phase("coarse")->bytes_received == 4);
  server.stop();
}

TEST_CASE("loopback: exact hash in db with gamma 0 matches; k=d returns everything") {
  SeededRng rng(5);
  auto db = random_db(64, rng);
  const auto needle = db[17];
  Server server(Database(db), ServerOptions{.k = 0});
  server.start("127.0.0.1", 0);

  ClientParams params;
  params.embedding = {9, 0.0, 0, 256};
  params.T = 1;
  const auto res = query("127.0.0.1", server.port(), needle, params, rng);
  CHECK(res.match);
  server.stop();

  Server all(Database(db), ServerOptions{.k = 9});
  all.start("127.0.0.1", 0);
  const auto res2 = query("127.0.0.1", all.port(), needle, params, rng);
  CHECK(res2.bucket_size == db.size());
  CHECK(res2.metrics.phase("coarse")->bytes_received == 4 + 32 * db.size());
  all.stop();
}

TEST_CASE("loopback: retrieval verdict equals a local plaintext check on the bucket") {
  SeededRng rng(6);
  auto db = random_db(256, rng);
  // plant some near neighbors
  for (int i = 0; i < 8; ++i) {
    auto h = db[static_cast<std::size_t>(i) * 4];
    for (int f = 0; f < 12; ++f) h.toggle(static_cast<std::uint32_t>(rng.uniform_below(256)));
    db.push_back(h);
  }
  Server server(Database(db), ServerOptions{.k = 2});
  server.start("127.0.0.1", 0);

  ClientParams params;
  params.embedding = {9, 0.05, 2, 256};
  params.T = 32;
  for (int t = 0; t < 30; ++t) {
    const auto q = t % 2 == 0 ? db[rng.uniform_below(db.size())] : BitVec::random(256, rng);
    SeededRng qrng(100 + t), orng(100 + t);
    const auto res = query("127.0.0.1", server.port(), q, params, qrng);

    // oracle: recompute the embedding with the same coins, scan locally
    const auto emb = emb_lsh(q, params.embedding, orng);
    const auto bucket = sim_lsh(emb, db, 2);
    bool want = false;
    for (const auto& h : bucket.gather(db)) want = want || hamming(q, h) < params.T;
    REQUIRE(res.match == want);
    REQUIRE(res.bucket_size == bucket.size());
  }
  server.stop();
}

TEST_CASE("loopback: server transmits exactly the bucket, duplicates preserved") {
  SeededRng rng(7);
  auto db = random_db(32, rng);
  db.push_back(db[5]);  // duplicate entry stays a duplicate on the wire
  Server server(Database(db), ServerOptions{.k = 9});
  server.start("127.0.0.1", 0);

  // speak the wire protocol directly to inspect the transcript
  auto stream = net::Stream::connect("127.0.0.1", server.port());
  SeededRng coins(8);
  const auto emb = emb_lsh(db[5], {9, 0.0, 9, 256}, coins);
  wire::SbbRequest req{wire::Mode::retrieval, emb.index_set, emb.bits};
  stream.write_frame(wire::encode_request(req));
  const auto payload = stream.read_frame(wire::kMaxPayload);
  const auto resp = wire::decode_server_payload(payload);
  REQUIRE(resp.status == 0x00);

  const auto bucket = sim_lsh(emb, db, 9);
  REQUIRE(resp.bucket.hashes == bucket.gather(db));  // order-stable, duplicates intact
  CHECK(std::count(resp.bucket.hashes.begin(), resp.bucket.hashes.end(), db[5]) >= 2);
  server.stop();
}

TEST_CASE("loopback: malformed and mismatched requests draw typed errors") {
  Server server({}, ServerOptions{});
  server.start("127.0.0.1", 0);

  {  // duplicate index
    auto stream = net::Stream::connect("127.0.0.1", server.port());
    std::vector<std::uint8_t> payload{wire::kVersion, 0, 0, 2, 0, 5, 0, 5, 0};
    stream.write_frame(payload);
    const auto resp = wire::decode_server_payload(stream.read_frame(wire::kMaxPayload));
    CHECK(resp.status == 0xff);
    CHECK(resp.error.code == wire::ErrorCode::malformed);
  }
  {  // wrong version
    auto stream = net::Stream::connect("127.0.0.1", server.port());
    std::vector<std::uint8_t> payload{7, 0, 0, 1, 0, 5, 0};
    stream.write_frame(payload);
    const auto resp = wire::decode_server_payload(stream.read_frame(wire::kMaxPayload));
    CHECK(resp.status == 0xff);
    CHECK(resp.error.code == wire::ErrorCode::bad_version);
  }
  server.stop();
}

TEST_CASE("loopback: sssp mode end to end, and cross-mode verdict agreement") {
  SeededRng rng(9);
  auto db = random_db(48, rng);
  Server server(Database(db), ServerOptions{.k = 2});
  server.start("127.0.0.1", 0);

  ClientParams retrieval;
  retrieval.embedding = {9, 0.05, 2, 256};
  retrieval.T = 64;  // capacity-aligned: distance < 64 iff <= 63
  ClientParams sssp = retrieval;
  sssp.mode = wire::Mode::sssp;

  int matches = 0;
  for (int t = 0; t < 24; ++t) {
    BitVec q;
    if (t % 3 == 0) {
      q = db[rng.uniform_below(db.size())];
      for (int f = 0; f < 20; ++f) q.toggle(static_cast<std::uint32_t>(rng.uniform_below(256)));
    } else {
      q = BitVec::random(256, rng);
    }
    SeededRng a(500 + t), b(500 + t);
    const auto r1 = query("127.0.0.1", server.port(), q, retrieval, a);
    const auto r2 = query("127.0.0.1", server.port(), q, sssp, b);
    // identical coins -> identical buckets -> verdicts agree
    REQUIRE(r1.bucket_size == r2.bucket_size);
    REQUIRE(r1.match == r2.match);
    matches += r1.match;
  }
  CHECK(matches > 0);
  server.stop();
}

TEST_CASE("loopback: database reload swaps the snapshot between sessions") {
  SeededRng rng(11);
  auto small = random_db(8, rng);
  auto big = random_db(64, rng);
  Server server(Database(small), ServerOptions{.k = 9});
  server.start("127.0.0.1", 0);

  ClientParams params;
  params.embedding = {9, 0.0, 9, 256};
  const auto probe = BitVec::random(256, rng);
  CHECK(query("127.0.0.1", server.port(), probe, params, rng).bucket_size == 8);
  server.swap_database(Database(big));
  CHECK(server.database_size() == 64);
  CHECK(query("127.0.0.1", server.port(), probe, params, rng).bucket_size == 64);
  server.stop();
}

TEST_CASE("loopback: concurrent identical noiseless requests get identical buckets") {
  SeededRng rng(10);
  auto db = random_db(128, rng);
  Server server(Database(db), ServerOptions{.k = 3});
  server.start("127.0.0.1", 0);

  const auto hash = db[31];
  ClientParams params;
  params.embedding = {9, 0.0, 3, 256};
  params.deterministic_key = derive_key(3, "net/test");

  std::vector<std::size_t> sizes(6);
  std::vector<std::thread> workers;
  for (int i = 0; i < 6; ++i)
    workers.emplace_back([&, i] {
      SystemRng sys;
      sizes[static_cast<std::size_t>(i)] =
          query("127.0.0.1", server.port(), hash, params, sys).bucket_size;
    });
  for (auto& w : workers) w.join();
  for (auto s : sizes) CHECK(s == sizes[0]);
  server.stop();
}
