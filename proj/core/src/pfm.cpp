#include "udc/pfm.hpp"

#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

#include "udc/errors.hpp"

namespace udc {
namespace {

// Reads one whitespace-delimited header token. PFM headers are three tokens
// (type, "w h", scale) separated by arbitrary whitespace; exactly one
// whitespace byte follows the scale token before the binary payload.
std::string next_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  while (c != EOF && std::isspace(c)) c = in.get();
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  return tok;
}

void byteswap4(unsigned char* p, size_t count) {
  for (size_t i = 0; i < count; ++i, p += 4) {
    std::swap(p[0], p[3]);
    std::swap(p[1], p[2]);
  }
}

bool host_little_endian() {
  const uint16_t probe = 1;
  unsigned char b;
  std::memcpy(&b, &probe, 1);
  return b == 1;
}

}  // namespace

Image read_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("pfm: cannot open " + path);

  std::string magic = next_token(in);
  int ch = 0;
  if (magic == "PF")
    ch = 3;
  else if (magic == "Pf")
    ch = 1;
  else
    throw IoError("pfm: bad magic in " + path);

  int w = 0, h = 0;
  double scale = 0.0;
  try {
    w = std::stoi(next_token(in));
    h = std::stoi(next_token(in));
    scale = std::stod(next_token(in));
  } catch (const std::exception&) {
    throw IoError("pfm: malformed header in " + path);
  }
  if (w <= 0 || h <= 0 || scale == 0.0)
    throw IoError("pfm: malformed header in " + path);

  size_t count = static_cast<size_t>(w) * h * ch;
  std::vector<float> raw(count);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(count * sizeof(float)));
  if (static_cast<size_t>(in.gcount()) != count * sizeof(float))
    throw IoError("pfm: truncated payload in " + path);

  bool file_le = scale < 0.0;
  if (file_le != host_little_endian())
    byteswap4(reinterpret_cast<unsigned char*>(raw.data()), count);

  // |scale| is a brightness multiplier; 1.0 passes bits through untouched.
  double mag = scale < 0 ? -scale : scale;

  Image im(h, w, ch);
  for (int y = 0; y < h; ++y) {
    // Bottom row first in the file.
    const float* row = raw.data() + static_cast<size_t>(h - 1 - y) * w * ch;
    double* dst = im.data.data() + static_cast<size_t>(y) * w * ch;
    if (mag == 1.0) {
      for (int i = 0; i < w * ch; ++i) dst[i] = row[i];
    } else {
      for (int i = 0; i < w * ch; ++i) dst[i] = row[i] * mag;
    }
  }
  return im;
}

void write_pfm(const std::string& path, const Image& im) {
  if (im.ch != 1 && im.ch != 3)
    throw std::invalid_argument("pfm: only 1- or 3-channel images");
  if (im.h <= 0 || im.w <= 0) throw std::invalid_argument("pfm: empty image");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("pfm: cannot create " + path);

  out << (im.ch == 3 ? "PF" : "Pf") << "\n"
      << im.w << " " << im.h << "\n"
      << "-1.0\n";

  std::vector<float> row(static_cast<size_t>(im.w) * im.ch);
  for (int y = im.h - 1; y >= 0; --y) {
    const double* src = im.data.data() + static_cast<size_t>(y) * im.w * im.ch;
    for (int i = 0; i < im.w * im.ch; ++i)
      row[static_cast<size_t>(i)] = static_cast<float>(src[i]);
    if (!host_little_endian())
      byteswap4(reinterpret_cast<unsigned char*>(row.data()), row.size());
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw IoError("pfm: write failed for " + path);
}

}  // namespace udc
