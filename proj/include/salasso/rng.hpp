#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace salasso {

// Counter-based generator (Philox 4x64, 10 rounds). Every draw is a pure
// function of (seed, stream, counter), so simulation output is identical
// across thread counts and replay order.
struct Philox4x64 {
  using Block = std::array<std::uint64_t, 4>;

  static Block generate(std::uint64_t key0, std::uint64_t key1,
                        std::uint64_t c0, std::uint64_t c1,
                        std::uint64_t c2, std::uint64_t c3);
};

// Distinct purposes get distinct key1 values so streams never collide.
// Callers compose stream ids as make_stream(tag, index).
enum class StreamTag : std::uint64_t {
  design = 1,
  signal = 2,
  response = 3,
  folds = 4,
  location_noise = 5,
  u_samples = 6,
  monte_carlo = 7,
  harness = 8,
};

inline std::uint64_t make_stream(StreamTag tag, std::uint64_t index = 0) {
  return (static_cast<std::uint64_t>(tag) << 32) | (index & 0xffffffffULL);
}

// Random field: values addressed by coordinates, not draw order. Uses
// counter words (i, j, k, 0); the sequential interface below reserves
// c3 = 1, so fields and streams sharing a key never overlap.
class RandomField {
 public:
  RandomField(std::uint64_t seed, std::uint64_t stream)
      : key0_(seed), key1_(stream) {}

  double uniform(std::uint64_t i, std::uint64_t j = 0, std::uint64_t k = 0) const;
  // Standard normal via Box-Muller (cosine branch), one block per value.
  double normal(std::uint64_t i, std::uint64_t j = 0, std::uint64_t k = 0) const;
  // Sign flip: +1 or -1 with equal probability.
  double sign(std::uint64_t i, std::uint64_t j = 0, std::uint64_t k = 0) const;

 private:
  std::uint64_t key0_, key1_;
};

// Sequential stream over the same keyed generator (counter domain c3 = 1).
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream)
      : key0_(seed), key1_(stream) {}

  double uniform();     // [0, 1)
  double normal();      // standard normal
  std::uint64_t next_u64();

  // Fisher-Yates shuffle of 0..n-1, used for fold assignment.
  template <typename IndexT>
  void shuffle(std::vector<IndexT>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(static_cast<std::uint64_t>(i)));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t bounded(std::uint64_t n);  // uniform on 0..n-1, unbiased

  std::uint64_t key0_, key1_;
  std::uint64_t ctr_ = 0;
};

// Shared helpers so field and stream agree on bit-to-double conventions.
double u64_to_unit(std::uint64_t w);          // [0, 1), 53-bit mantissa
double u64_to_unit_open(std::uint64_t w);     // (0, 1], safe for log
double box_muller_cos(std::uint64_t w0, std::uint64_t w1);

}  // namespace salasso
