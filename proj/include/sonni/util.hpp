#pragma once

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace sonni {

// splitmix64 step function. Used everywhere a deterministic stream is needed
// so that results are bit-identical across platforms and thread counts.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// One-shot mix of two words, for deriving independent sub-seeds.
inline uint64_t mix_seed(uint64_t seed, uint64_t tag) {
  uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (tag + 1));
  return splitmix64(s);
}

// Small deterministic RNG over the splitmix64 sequence.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() { return splitmix64(state_); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform in [-bound, bound].
  double uniform_sym(double bound) { return bound * (2.0 * uniform01() - 1.0); }

  // Uniform integer in [0, n). Rejection over a power-of-two mask keeps the
  // draw unbiased and platform independent.
  uint64_t below(uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
      uint64_t v = next() & mask;
      if (v < n) return v;
    }
  }

  // Independent child stream; forking does not disturb this stream.
  Rng fork(uint64_t tag) const { return Rng(mix_seed(state_, tag)); }

 private:
  uint64_t state_;
};

// --- little-endian byte helpers (canonical encodings are LE by contract) ---

inline void put_u32le(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 24));
}

inline void put_u64le(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

inline void put_i64le(std::vector<uint8_t>& out, int64_t v) {
  put_u64le(out, static_cast<uint64_t>(v));
}

inline void put_f64le(std::vector<uint8_t>& out, double d) {
  uint64_t bits;
  std::memcpy(&bits, &d, sizeof(bits));
  put_u64le(out, bits);
}

// Cursor-based reads; throw on underrun so malformed input is always loud.
struct ByteReader {
  const uint8_t* data;
  size_t size;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > size) throw std::runtime_error("byte stream truncated");
  }
  uint8_t u8() {
    need(1);
    return data[pos++];
  }
  uint32_t u32le() {
    need(4);
    uint32_t v = static_cast<uint32_t>(data[pos]) |
                 static_cast<uint32_t>(data[pos + 1]) << 8 |
                 static_cast<uint32_t>(data[pos + 2]) << 16 |
                 static_cast<uint32_t>(data[pos + 3]) << 24;
    pos += 4;
    return v;
  }
  uint64_t u64le() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(data[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
  double f64le() {
    uint64_t bits = u64le();
    double d;
    std::memcpy(&d, &bits, sizeof(d));
    return d;
  }
  std::vector<uint8_t> bytes(size_t n) {
    need(n);
    std::vector<uint8_t> out(data + pos, data + pos + n);
    pos += n;
    return out;
  }
  bool done() const { return pos == size; }
};

std::string to_hex(const uint8_t* data, size_t n);
std::string to_hex(const std::vector<uint8_t>& bytes);

}  // namespace sonni
