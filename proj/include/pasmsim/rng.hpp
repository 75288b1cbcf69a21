// Copyright 2026 The pasmsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace pasm {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Collapses (seed, path...) into one substream id. Frames, blocks and sweep
// points get independent streams regardless of execution order.
inline uint64_t substream(uint64_t seed, std::initializer_list<uint64_t> path) {
  uint64_t s = splitmix64(seed);
  for (uint64_t p : path) s = splitmix64(s ^ (p + 0x9e3779b97f4a7c15ull));
  return s;
}

// Philox2x64-10 counter-based generator. Pure function of (key, stream,
// block counter), so parallel Monte-Carlo draws are reproducible without
// any sequencing between streams.
class Rng {
 public:
  Rng(uint64_t key, uint64_t stream) : key_(key), ctr_hi_(stream) {}

  uint64_t next_u64() {
    if (avail_ == 0) {
      fill_block();
      ++ctr_lo_;
    }
    return out_[--avail_];
  }

  // [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // Box-Muller; u1 in (0, 1] keeps the log finite
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // CN(0, 1): unit total variance split over real and imaginary parts
  std::complex<double> cnormal() {
    const double s = std::numbers::sqrt2;
    return {normal() / s, normal() / s};
  }

 private:
  static void mulhilo(uint64_t a, uint64_t b, uint64_t& hi, uint64_t& lo) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<uint64_t>(p >> 64);
    lo = static_cast<uint64_t>(p);
  }

  void fill_block() {
    uint64_t x0 = ctr_hi_, x1 = ctr_lo_, k = key_;
    for (int round = 0; round < 10; ++round) {
      uint64_t hi, lo;
      mulhilo(0xd2b74407b1ce6e93ull, x0, hi, lo);
      x0 = hi ^ k ^ x1;
      x1 = lo;
      k += 0x9e3779b97f4a7c15ull;
    }
    out_[0] = x0;
    out_[1] = x1;
    avail_ = 2;
  }

  uint64_t key_;
  uint64_t ctr_hi_;
  uint64_t ctr_lo_ = 0;
  uint64_t out_[2]{};
  int avail_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace pasm
