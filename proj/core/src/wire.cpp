#include "sbb/wire.hpp"

#include <cstring>

#include "sbb/errors.hpp"

namespace sbb::wire {

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) {
    buf_.push_back(static_cast<std::uint8_t>(v >> 8));
    buf_.push_back(static_cast<std::uint8_t>(v));
  }
  void u32(std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
  std::uint8_t u8() {
    need(1);
    return b_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    const std::uint16_t v = static_cast<std::uint16_t>((b_[pos_] << 8) | b_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | b_[pos_ + static_cast<std::size_t>(i)];
    pos_ += 4;
    return v;
  }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto out = b_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  void expect_end() const {
    if (pos_ != b_.size()) throw ParseError("wire: trailing bytes in payload");
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > b_.size()) throw ParseError("wire: truncated payload");
  }
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

void check_version(std::uint8_t v) {
  if (v != kVersion) throw VersionMismatch("wire: unsupported protocol version");
}

void write_packed_bits(Writer& w, const BitVec& v) {
  const auto packed = v.to_bytes();
  w.bytes(packed);
}

BitVec read_packed_bits(Reader& r, std::uint32_t nbits) {
  const auto raw = r.bytes((nbits + 7) / 8);
  // Reject nonzero padding so encodings stay canonical.
  if (nbits % 8 != 0) {
    const std::uint8_t pad_mask = static_cast<std::uint8_t>(0xffu >> (nbits % 8));
    if ((raw.back() & pad_mask) != 0) throw ParseError("wire: nonzero bit padding");
  }
  return BitVec::from_bytes(raw, nbits);
}

template <class A>
void write_arrays(Writer& w, const std::vector<A>& arrs) {
  for (const auto& a : arrs) w.bytes(a);
}

std::vector<std::array<std::uint8_t, 32>> read_arrays(Reader& r, std::uint32_t count) {
  std::vector<std::array<std::uint8_t, 32>> out(count);
  for (auto& a : out) {
    const auto b = r.bytes(32);
    std::memcpy(a.data(), b.data(), 32);
  }
  return out;
}

std::uint32_t read_count(Reader& r, std::size_t unit) {
  const std::uint32_t count = r.u32();
  if (static_cast<std::size_t>(count) * unit > kMaxPayload)
    throw ParseError("wire: count exceeds payload limit");
  return count;
}

}  // namespace

std::vector<std::uint8_t> encode_request(const SbbRequest& r) {
  if (r.bits.size() != r.indices.size())
    throw LengthMismatch("wire: request bits/indices mismatch");
  Writer w;
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(r.mode));
  w.u16(static_cast<std::uint16_t>(r.indices.size()));
  for (auto ix : r.indices.indices) w.u16(ix);
  write_packed_bits(w, r.bits);
  return w.take();
}

SbbRequest decode_request(std::span<const std::uint8_t> payload) {
  Reader r(payload);
  check_version(r.u8());
  const std::uint8_t mode = r.u8();
  if (mode > 1) throw ParseError("wire: unknown mode");
  SbbRequest out;
  out.mode = static_cast<Mode>(mode);
  const std::uint16_t d = r.u16();
  if (d == 0 || d > 256) throw ParseError("wire: d out of range");
  out.indices.indices.resize(d);
  for (auto& ix : out.indices.indices) ix = r.u16();
  out.indices.validate(256);  // distinct, each < 256
  out.bits = read_packed_bits(r, d);
  r.expect_end();
  return out;
}

std::vector<std::uint8_t> encode_bucket(const BucketResponse& b) {
  Writer w;
  w.u8(kVersion);
  w.u8(0x00);
  w.u32(static_cast<std::uint32_t>(b.hashes.size()));
  for (const auto& h : b.hashes) {
    if (h.size() != 256) throw LengthMismatch("wire: bucket hashes must be 256-bit");
    write_packed_bits(w, h);
  }
  return w.take();
}

std::vector<std::uint8_t> encode_sssp1(const SsspMsg1& m) {
  if (m.sketches.size() != m.tokens.size())
    throw LengthMismatch("wire: sketch/token count mismatch");
  Writer w;
  w.u8(kVersion);
  w.u8(0x01);
  w.u32(static_cast<std::uint32_t>(m.sketches.size()));
  for (const auto& z : m.sketches) {
    w.u16(static_cast<std::uint16_t>(z.size()));
    write_packed_bits(w, z);
  }
  write_arrays(w, m.tokens);
  return w.take();
}

std::vector<std::uint8_t> encode_sssp3(const SsspMsg3& m) {
  Writer w;
  w.u8(kVersion);
  w.u8(0x02);
  w.u32(static_cast<std::uint32_t>(m.elements.size()));
  write_arrays(w, m.elements);
  return w.take();
}

std::vector<std::uint8_t> encode_error(const ErrorFrame& e) {
  Writer w;
  w.u8(kVersion);
  w.u8(0xff);
  w.u8(static_cast<std::uint8_t>(e.code));
  const auto n = std::min<std::size_t>(e.message.size(), 0xffff);
  w.u16(static_cast<std::uint16_t>(n));
  w.bytes(std::span(reinterpret_cast<const std::uint8_t*>(e.message.data()), n));
  return w.take();
}

ServerPayload decode_server_payload(std::span<const std::uint8_t> payload) {
  Reader r(payload);
  check_version(r.u8());
  ServerPayload out;
  out.status = r.u8();
  switch (out.status) {
    case 0x00: {
      const auto count = read_count(r, 32);
      out.bucket.hashes.reserve(count);
      for (std::uint32_t i = 0; i < count; ++i)
        out.bucket.hashes.push_back(read_packed_bits(r, 256));
      break;
    }
    case 0x01: {
      const auto count = read_count(r, 33);
      out.sssp1.sketches.reserve(count);
      for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint16_t nbits = r.u16();
        if (nbits == 0 || nbits > 256) throw ParseError("wire: sketch length out of range");
        out.sssp1.sketches.push_back(read_packed_bits(r, nbits));
      }
      out.sssp1.tokens = read_arrays(r, count);
      break;
    }
    case 0x02: {
      const auto count = read_count(r, 32);
      out.sssp3.elements = read_arrays(r, count);
      break;
    }
    case 0xff: {
      out.error.code = static_cast<ErrorCode>(r.u8());
      const std::uint16_t n = r.u16();
      const auto b = r.bytes(n);
      out.error.message.assign(reinterpret_cast<const char*>(b.data()), b.size());
      break;
    }
    default:
      throw ParseError("wire: unknown status byte");
  }
  r.expect_end();
  return out;
}

std::vector<std::uint8_t> encode_sssp2(const SsspMsg2& m) {
  Writer w;
  w.u8(kVersion);
  w.u32(static_cast<std::uint32_t>(m.elements.size()));
  write_arrays(w, m.elements);
  return w.take();
}

SsspMsg2 decode_sssp2(std::span<const std::uint8_t> payload) {
  Reader r(payload);
  check_version(r.u8());
  SsspMsg2 out;
  const auto count = read_count(r, 32);
  out.elements = read_arrays(r, count);
  r.expect_end();
  return out;
}

std::size_t body_bytes(std::span<const std::uint8_t> payload, bool has_status_byte) {
  const std::size_t envelope = has_status_byte ? 2 : 1;
  return payload.size() >= envelope ? payload.size() - envelope : 0;
}

}  // namespace sbb::wire
