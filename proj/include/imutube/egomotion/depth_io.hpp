#pragma once

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "imutube/core/io.hpp"

namespace imutube::egomotion {

/// Row-major depth in meters. NaN or non-positive entries are invalid.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> depth;

  float at(int x, int y) const { return depth[static_cast<std::size_t>(y) * width + x]; }
  bool valid(int x, int y) const {
    const float z = at(x, y);
    return std::isfinite(z) && z > 0.0f;
  }
};

/// 8-bit interleaved RGB, row-major.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  const std::uint8_t* pixel(int x, int y) const { return &data[(static_cast<std::size_t>(y) * width + x) * 3]; }
  std::uint8_t* pixel(int x, int y) { return &data[(static_cast<std::size_t>(y) * width + x) * 3]; }
};

/// `<clip>_<frame:06>` without extension.
inline std::string frame_stem(const std::string& clip, int frame) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_%06d", frame);
  return clip + buf;
}

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

inline std::uint32_t get_u32(const std::string& in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

}  // namespace detail

inline std::string encode_dmap(const DepthMap& m) {
  if (m.width < 0 || m.height < 0 || m.depth.size() != static_cast<std::size_t>(m.width) * m.height) {
    throw DataError("encode_dmap: size does not match dimensions");
  }
  std::string out = "DMAP";
  detail::put_u32(out, static_cast<std::uint32_t>(m.width));
  detail::put_u32(out, static_cast<std::uint32_t>(m.height));
  out.reserve(out.size() + 4 * m.depth.size());
  for (float f : m.depth) detail::put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

inline DepthMap decode_dmap(const std::string& bytes, const std::string& source = "<dmap>") {
  if (bytes.size() < 12 || bytes.compare(0, 4, "DMAP") != 0) throw ParseError(source, 0, "not a DMAP file");
  DepthMap m;
  const std::uint32_t w = detail::get_u32(bytes, 4), h = detail::get_u32(bytes, 8);
  if (w > 1u << 16 || h > 1u << 16) throw ParseError(source, 0, "implausible dimensions");
  m.width = static_cast<int>(w);
  m.height = static_cast<int>(h);
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (bytes.size() != 12 + 4 * n) throw ParseError(source, 0, "truncated or oversized payload");
  m.depth.resize(n);
  for (std::size_t i = 0; i < n; ++i) m.depth[i] = std::bit_cast<float>(detail::get_u32(bytes, 12 + 4 * i));
  return m;
}

inline void write_dmap(const fs::path& path, const DepthMap& m) { write_file_atomic(path, encode_dmap(m), true); }

inline DepthMap read_dmap(const fs::path& path) { return decode_dmap(read_file(path, true), path.string()); }

inline std::string encode_ppm(const RgbImage& img) {
  if (img.data.size() != static_cast<std::size_t>(img.width) * img.height * 3) {
    throw DataError("encode_ppm: size does not match dimensions");
  }
  std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.data.data()), img.data.size());
  return out;
}

inline RgbImage decode_ppm(const std::string& bytes, const std::string& source = "<ppm>") {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&] {
    skip_space();
    long v = 0;
    const std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      v = v * 10 + (bytes[pos] - '0');
      if (v > 1 << 20) throw ParseError(source, 0, "header value too large");
      ++pos;
    }
    if (pos == start) throw ParseError(source, 0, "malformed PPM header");
    return static_cast<int>(v);
  };
  if (bytes.size() < 2 || bytes.compare(0, 2, "P6") != 0) throw ParseError(source, 0, "not a binary PPM (P6)");
  pos = 2;
  RgbImage img;
  img.width = read_int();
  img.height = read_int();
  if (read_int() != 255) throw ParseError(source, 0, "only 8-bit PPM supported");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw ParseError(source, 0, "malformed PPM header");
  }
  ++pos;
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height * 3;
  if (bytes.size() - pos != n) throw ParseError(source, 0, "pixel payload size mismatch");
  img.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return img;
}

inline void write_ppm(const fs::path& path, const RgbImage& img) { write_file_atomic(path, encode_ppm(img), true); }

inline RgbImage read_ppm(const fs::path& path) { return decode_ppm(read_file(path, true), path.string()); }

}  // namespace imutube::egomotion
