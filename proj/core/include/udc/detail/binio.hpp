#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "udc/errors.hpp"

// Little-endian primitives for the binary container formats.
namespace udc::detail {

inline bool host_le() {
  const uint16_t probe = 1;
  unsigned char b;
  std::memcpy(&b, &probe, 1);
  return b == 1;
}

template <typename T>
void write_le(std::ostream& out, T v) {
  static_assert(sizeof(T) == 2 || sizeof(T) == 4 || sizeof(T) == 8);
  unsigned char raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  if (!host_le())
    for (size_t i = 0; i < sizeof(T) / 2; ++i)
      std::swap(raw[i], raw[sizeof(T) - 1 - i]);
  out.write(reinterpret_cast<const char*>(raw), sizeof(T));
}

template <typename T>
T read_le(std::istream& in, const std::string& what) {
  unsigned char raw[sizeof(T)];
  in.read(reinterpret_cast<char*>(raw), sizeof(T));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(T)))
    throw IoError("truncated while reading " + what);
  if (!host_le())
    for (size_t i = 0; i < sizeof(T) / 2; ++i)
      std::swap(raw[i], raw[sizeof(T) - 1 - i]);
  T v;
  std::memcpy(&v, raw, sizeof(T));
  return v;
}

inline void write_f32(std::ostream& out, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  write_le<uint32_t>(out, bits);
}

inline float read_f32(std::istream& in, const std::string& what) {
  uint32_t bits = read_le<uint32_t>(in, what);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace udc::detail
