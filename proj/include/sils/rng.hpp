#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>

namespace sils {

// Counter-based generator (Philox-4x32-10, Salmon et al. 2011). The key is the
// root seed and the high counter words carry a 64-bit stream id, so every
// stream owns a disjoint 2^64 block range: distinct stream ids never overlap
// and draws are reproducible regardless of evaluation order or worker count.
class Philox {
 public:
  using result_type = std::uint64_t;

  Philox() : Philox(0, 0) {}
  Philox(std::uint64_t key, std::uint64_t stream) {
    key_[0] = static_cast<std::uint32_t>(key);
    key_[1] = static_cast<std::uint32_t>(key >> 32);
    ctr_[0] = 0;
    ctr_[1] = 0;
    ctr_[2] = static_cast<std::uint32_t>(stream);
    ctr_[3] = static_cast<std::uint32_t>(stream >> 32);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (have_ == 0) refill();
    return out_[--have_];
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static void round(std::uint32_t x[4], const std::uint32_t k[2]) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * x[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * x[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t y0 = hi1 ^ x[1] ^ k[0];
    const std::uint32_t y1 = lo1;
    const std::uint32_t y2 = hi0 ^ x[3] ^ k[1];
    const std::uint32_t y3 = lo0;
    x[0] = y0;
    x[1] = y1;
    x[2] = y2;
    x[3] = y3;
  }

  void refill() {
    std::uint32_t x[4] = {ctr_[0], ctr_[1], ctr_[2], ctr_[3]};
    std::uint32_t k[2] = {key_[0], key_[1]};
    for (int i = 0; i < 10; ++i) {
      round(x, k);
      k[0] += kW0;
      k[1] += kW1;
    }
    out_[1] = (static_cast<std::uint64_t>(x[1]) << 32) | x[0];
    out_[0] = (static_cast<std::uint64_t>(x[3]) << 32) | x[2];
    have_ = 2;
    if (++ctr_[0] == 0) ++ctr_[1];  // 64-bit block counter within the stream
  }

  std::uint32_t key_[2];
  std::uint32_t ctr_[4];
  std::uint64_t out_[2] = {0, 0};
  int have_ = 0;
};

// What a stream is for; part of the stream id.
enum class StreamTag : std::uint64_t {
  dataset = 1,       // synthetic data generation (rep = replication id)
  stat_plan = 2,     // r-tuple sampling plan per (bandwidth, stratum)
  jk_plan = 3,       // (r-1)-tuple jackknife plan per (bandwidth, stratum, k)
  boot_data = 4,     // per-observation Gaussian multipliers (rep = bootstrap draw)
  boot_stratum = 5,  // per-(bandwidth, stratum) Gaussian multiplier (rep = draw)
  noise = 6,         // auxiliary Monte Carlo (oracle checks, fixtures)
};

// Packs (tag, bandwidth index, stratum m, data index k, replication id) into
// the 64-bit stream word:  tag:4 | b:6 | m:14 | k:20 | rep:20.
inline std::uint64_t stream_id(StreamTag tag, std::uint64_t b = 0, std::uint64_t m = 0,
                               std::uint64_t k = 0, std::uint64_t rep = 0) {
  if (b >= (1ull << 6) || m >= (1ull << 14) || k >= (1ull << 20) || rep >= (1ull << 20))
    throw std::invalid_argument("stream_id: field out of range");
  return (static_cast<std::uint64_t>(tag) << 60) | (b << 54) | (m << 40) | (k << 20) | rep;
}

// splitmix64; used to derive independent root seeds for Monte Carlo replications.
inline std::uint64_t mix_seed(std::uint64_t root, std::uint64_t salt) {
  std::uint64_t z = root + (salt + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline double uniform01(Philox& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Unbiased uniform draw in [0, bound) (Lemire's multiply-reject method).
inline std::uint64_t uniform_below(Philox& g, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
  std::uint64_t x = g();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
  std::uint64_t lo = static_cast<std::uint64_t>(m);
  if (lo < bound) {
    const std::uint64_t t = (0 - bound) % bound;
    while (lo < t) {
      x = g();
      m = static_cast<unsigned __int128>(x) * bound;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace sils
