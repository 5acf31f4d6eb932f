#pragma once

#include <cstdint>
#include <vector>

namespace gpa {

// SplitMix64 finalizer; full-period integer mix, bitwise reproducible everywhere.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Order-sensitive combination of the (seed, graph, epoch, slot) tuple.
inline uint64_t hash64(uint64_t a, uint64_t b, uint64_t c, uint64_t d) {
  uint64_t h = mix64(a);
  h = mix64(h ^ (b + 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ (c + 0x517cc1b727220a95ULL));
  h = mix64(h ^ (d + 0x2545f4914f6cdd1dULL));
  return h;
}

// Counter-based stream: draw i is mix64(key + i). Identical key -> identical
// sequence, independent of how many values other streams consumed.
class RngStream {
 public:
  explicit RngStream(uint64_t key) : key_(key) {}
  RngStream(uint64_t seed, uint64_t graph_id, uint64_t epoch, uint64_t slot)
      : key_(hash64(seed, graph_id, epoch, slot)) {}

  uint64_t next_u64() { return mix64(key_ + counter_++); }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
  }

  // Uniform in [0, n); rejection sampling, no modulo bias.
  uint64_t next_index(uint64_t n) {
    if (n == 0) return 0;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(next_index(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct values from 0..n-1, ascending order.
  std::vector<int> sample_indices(int n, int k);

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace gpa
