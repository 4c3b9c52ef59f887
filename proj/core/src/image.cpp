#include "sbb/image.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

#include "sbb/errors.hpp"

namespace sbb {

namespace {
// Reads one whitespace-delimited token, skipping '#' comment lines.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw ParseError("pgm: unexpected end of header");
  return tok;
}

std::uint32_t parse_u32(const std::string& s) {
  std::uint32_t v = 0;
  if (s.empty()) throw ParseError("pgm: bad integer");
  for (char c : s) {
    if (c < '0' || c > '9') throw ParseError("pgm: bad integer");
    v = v * 10 + static_cast<std::uint32_t>(c - '0');
  }
  return v;
}
}  // namespace

LuminanceImage load_pgm(std::istream& in) {
  if (next_token(in) != "P5") throw ParseError("pgm: not a binary P5 file");
  LuminanceImage img;
  img.width = parse_u32(next_token(in));
  img.height = parse_u32(next_token(in));
  const std::uint32_t maxval = parse_u32(next_token(in));
  if (maxval == 0 || maxval > 255) throw ParseError("pgm: only 8-bit maxval supported");
  if (img.width == 0 || img.height == 0) throw ParseError("pgm: zero dimension");
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
    throw ParseError("pgm: truncated pixel data");
  return img;
}

LuminanceImage load_pgm_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("pgm: cannot open " + path);
  return load_pgm(f);
}

void write_pgm(std::ostream& out, const LuminanceImage& img) {
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
}

}  // namespace sbb
