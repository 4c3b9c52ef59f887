#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sbb/bitvec.hpp"
#include "sbb/embedding.hpp"

namespace sbb::wire {

inline constexpr std::uint8_t kVersion = 1;

/// Second-stage protocol selector carried in the request.
enum class Mode : std::uint8_t { retrieval = 0, sssp = 1 };

/// Frames are length-prefixed (4-byte big-endian payload size) on a single
/// ordered byte stream. Payload layouts, with all integers big-endian:
///
///   request (client to server):
///     version u8 | mode u8 | d u16 | d x u16 indices | ceil(d/8) bits
///   server responses share a 2-byte envelope:
///     version u8 | status u8 | body
///       status 0x00  bucket:     count u32 | count x 32-byte hashes
///       status 0x01  sssp msg 1: count u32
///                    | count x (nbits u16 | ceil(nbits/8) syndrome bytes)
///                    | count x 32-byte tokens
///       status 0x02  sssp msg 3: count u32 | count x 32-byte elements
///       status 0xff  error:      code u8 | len u16 | message
///   sssp msg 2 (client to server):
///     version u8 | count u32 | count x 32-byte elements
///
/// Packed bit buffers are MSB-first with zero padding; nonzero padding is
/// rejected. Session metrics count payload bytes net of the length prefix
/// and the version/status envelope, so an empty bucket response accounts
/// for exactly its 4-byte count field.
inline constexpr std::size_t kMaxPayload = 64u << 20;

enum class ErrorCode : std::uint8_t {
  bad_version = 1,
  malformed = 2,
  bad_mode = 3,
  internal = 4,
};

struct SbbRequest {
  Mode mode = Mode::retrieval;
  IndexSet indices;
  BitVec bits;  // indices.size() bits
};

struct BucketResponse {
  std::vector<BitVec> hashes;  // 256-bit each
};

struct SsspMsg1 {
  std::vector<BitVec> sketches;
  std::vector<std::array<std::uint8_t, 32>> tokens;
};

struct SsspMsg2 {
  std::vector<std::array<std::uint8_t, 32>> elements;
};

struct SsspMsg3 {
  std::vector<std::array<std::uint8_t, 32>> elements;
};

struct ErrorFrame {
  ErrorCode code = ErrorCode::internal;
  std::string message;
};

/// Server-to-client payload: exactly one alternative is populated based on
/// the status byte.
struct ServerPayload {
  std::uint8_t status = 0;
  BucketResponse bucket;
  SsspMsg1 sssp1;
  SsspMsg3 sssp3;
  ErrorFrame error;
};

std::vector<std::uint8_t> encode_request(const SbbRequest& r);
SbbRequest decode_request(std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> encode_bucket(const BucketResponse& b);
std::vector<std::uint8_t> encode_sssp1(const SsspMsg1& m);
std::vector<std::uint8_t> encode_sssp3(const SsspMsg3& m);
std::vector<std::uint8_t> encode_error(const ErrorFrame& e);
ServerPayload decode_server_payload(std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> encode_sssp2(const SsspMsg2& m);
SsspMsg2 decode_sssp2(std::span<const std::uint8_t> payload);

/// Body size excluding the envelope; what session metrics account for.
std::size_t body_bytes(std::span<const std::uint8_t> payload, bool has_status_byte);

}  // namespace sbb::wire
