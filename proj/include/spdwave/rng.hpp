// Copyright 2026 The spdwave Authors.
// SPDX-License-Identifier: Apache-2.0

// Counter-based random streams addressed by (seed, path).
//
// Each stream runs Philox4x32-10 with a 64-bit key derived by hashing the
// seed and every path element through splitmix64, and a 128-bit counter that
// starts at zero. Streams with different paths share nothing, so replicate b
// of sample k can be drawn on any thread in any order with the same result.
// Normal variates use the Box-Muller transform on two uniforms in (0, 1).

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <vector>

namespace spdwave {

inline constexpr const char* kRngAlgorithm = "philox4x32-10/splitmix64-key/box-muller";

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline constexpr PhiloxCounter philox4x32_10(PhiloxCounter c, PhiloxKey k) noexcept {
  constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kM0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kM1} * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

class RngStream {
 public:
  using result_type = std::uint32_t;

  explicit RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {})
      : seed_(seed), path_(path) {
    rekey();
  }
  RngStream(std::uint64_t seed, std::vector<std::uint64_t> path)
      : seed_(seed), path_(std::move(path)) {
    rekey();
  }

  /// Independent child stream with `index` appended to the path.
  RngStream substream(std::uint64_t index) const {
    auto p = path_;
    p.push_back(index);
    return RngStream(seed_, std::move(p));
  }
  RngStream substream(std::initializer_list<std::uint64_t> indices) const {
    auto p = path_;
    p.insert(p.end(), indices);
    return RngStream(seed_, std::move(p));
  }

  std::uint64_t seed() const noexcept { return seed_; }
  const std::vector<std::uint64_t>& path() const noexcept { return path_; }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (lane_ == 4) {
      block_ = philox4x32_10(counter_, key_);
      for (auto& w : counter_)
        if (++w != 0) break;
      lane_ = 0;
    }
    return block_[lane_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = (*this)();
    return (hi << 32) | (*this)();
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  void rekey() {
    std::uint64_t h = splitmix64(seed_);
    for (std::uint64_t p : path_) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    key_ = {static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  }

  std::uint64_t seed_;
  std::vector<std::uint64_t> path_;
  PhiloxKey key_{};
  PhiloxCounter counter_{};
  PhiloxCounter block_{};
  int lane_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace spdwave
