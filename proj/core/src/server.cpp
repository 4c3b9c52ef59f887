#include "sbb/server.hpp"

#include <algorithm>
#include <chrono>
#include <utility>

#include "sbb/embedding.hpp"
#include "sbb/errors.hpp"
#include "sbb/rng.hpp"
#include "sbb/sssp.hpp"
#include "sbb/wire.hpp"

namespace sbb {

namespace {
bool scalar_is_zero(const Ristretto255::Scalar& s) {
  return std::all_of(s.begin(), s.end(), [](std::uint8_t b) { return b == 0; });
}
}  // namespace

Server::Server(Database db, ServerOptions opts)
    : db_(std::make_shared<const Database>(std::move(db))),
      opts_(opts),
      code_(SketchCode::reed_muller(8)) {
  if (scalar_is_zero(opts_.oprf_key)) {
    SystemRng rng;
    opts_.oprf_key = Ristretto255::random_scalar(rng);
  }
}

Server::~Server() { stop(); }

void Server::start(const std::string& host, std::uint16_t port) {
  if (running_.exchange(true)) throw Error("server: already running");
  listener_ = std::make_unique<net::Listener>(host, port);
  acceptor_ = std::thread([this] { accept_loop(); });
}

void Server::stop() {
  if (!running_.exchange(false)) return;
  if (listener_) listener_->shutdown();
  if (acceptor_.joinable()) acceptor_.join();
  while (active_sessions_.load() != 0)
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  listener_.reset();
}

std::uint16_t Server::port() const {
  if (!listener_) throw Error("server: not started");
  return listener_->port();
}

void Server::swap_database(Database db) {
  auto next = std::make_shared<const Database>(std::move(db));
  std::lock_guard lock(mu_);
  db_ = std::move(next);
}

std::size_t Server::database_size() const { return snapshot()->size(); }

std::shared_ptr<const Database> Server::snapshot() const {
  std::lock_guard lock(mu_);
  return db_;
}

void Server::accept_loop() {
  while (running_) {
    net::Stream stream;
    try {
      stream = listener_->accept();
    } catch (const Error&) {
      if (!running_) break;
      continue;
    }
    active_sessions_.fetch_add(1);
    std::thread([this](net::Stream s) {
      session(std::move(s));
      active_sessions_.fetch_sub(1);
    }, std::move(stream)).detach();
  }
}

void Server::session(net::Stream stream) {
  stream.set_write_rate_limit(opts_.link_bytes_per_second);
  auto send_error = [&stream](wire::ErrorCode code, const std::string& msg) {
    try {
      stream.write_frame(wire::encode_error({code, msg}));
    } catch (const Error&) {
    }
  };

  try {
    const auto payload = stream.read_frame(wire::kMaxPayload);
    wire::SbbRequest req;
    try {
      req = wire::decode_request(payload);
    } catch (const VersionMismatch& e) {
      send_error(wire::ErrorCode::bad_version, e.what());
      return;
    } catch (const ParseError& e) {
      send_error(wire::ErrorCode::malformed, e.what());
      return;
    } catch (const std::invalid_argument& e) {
      send_error(wire::ErrorCode::malformed, e.what());
      return;
    }

    const auto db = snapshot();
    CoarseEmbedding emb{req.indices, req.bits};
    const auto bucket = sim_lsh_parallel(emb, *db, std::min(opts_.k, req.indices.size()));

    if (req.mode == wire::Mode::retrieval) {
      wire::BucketResponse resp;
      resp.hashes = bucket.gather(*db);
      stream.write_frame(wire::encode_bucket(resp));
      return;
    }

    // Sketch mode: msg1 = sketches + tokens, then evaluate the blinded
    // elements from msg2.
    const auto members = bucket.gather(*db);
    const auto bundle = sssp_server_prepare<Ristretto255>(members, opts_.oprf_key, code_);
    wire::SsspMsg1 msg1{bundle.sketches, bundle.tokens};
    stream.write_frame(wire::encode_sssp1(msg1));

    const auto payload2 = stream.read_frame(wire::kMaxPayload);
    wire::SsspMsg2 msg2;
    try {
      msg2 = wire::decode_sssp2(payload2);
    } catch (const ParseError& e) {
      send_error(wire::ErrorCode::malformed, e.what());
      return;
    }
    if (msg2.elements.size() != members.size()) {
      send_error(wire::ErrorCode::malformed, "element count does not match bucket");
      return;
    }
    wire::SsspMsg3 msg3;
    msg3.elements.reserve(msg2.elements.size());
    try {
      for (const auto& x : msg2.elements)
        msg3.elements.push_back(
            oprf_evaluate<Ristretto255>(Ristretto255::decode(x), opts_.oprf_key));
    } catch (const Error& e) {
      send_error(wire::ErrorCode::malformed, e.what());
      return;
    }
    stream.write_frame(wire::encode_sssp3(msg3));
  } catch (const Error&) {
    // Transport failure or oversized frame; nothing to answer on.
  }
}

}  // namespace sbb
