#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "dart/errors.hpp"

namespace dart {

// Little-endian byte helpers shared by the binary artifact formats.

inline void le_put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xFF));
}
inline void le_put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xFF));
}
inline void le_put_f32(std::vector<uint8_t>& out, float f) {
  uint32_t bits;
  std::memcpy(&bits, &f, 4);
  le_put_u32(out, bits);
}
inline void le_put_f64(std::vector<uint8_t>& out, double d) {
  uint64_t bits;
  std::memcpy(&bits, &d, 8);
  le_put_u64(out, bits);
}

/// Bounds-checked sequential reader over a byte buffer.
struct ByteReader {
  const uint8_t* p;
  size_t remaining;
  std::string what;

  ByteReader(const std::vector<uint8_t>& bytes, std::string label)
      : p(bytes.data()), remaining(bytes.size()), what(std::move(label)) {}

  void need(size_t n) const {
    if (remaining < n) throw TruncatedRecord(what + ": unexpected end of data");
  }
  void expect_magic(const char m[4]) {
    need(4);
    if (std::memcmp(p, m, 4) != 0) throw ParseError(what + ": bad magic");
    p += 4;
    remaining -= 4;
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    p += 4;
    remaining -= 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    p += 8;
    remaining -= 8;
    return v;
  }
  float f32() {
    const uint32_t bits = u32();
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
  }
  double f64() {
    const uint64_t bits = u64();
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
  }
  void done() const {
    if (remaining != 0) throw ParseError(what + ": trailing bytes");
  }
};

}  // namespace dart
