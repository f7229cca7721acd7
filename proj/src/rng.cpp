#include "salasso/rng.hpp"

#include <cmath>
#include <vector>

namespace salasso {

namespace {

constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMult1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline std::uint64_t mulhi64(std::uint64_t a, std::uint64_t b) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(a) * b) >> 64);
}

inline void round_once(std::uint64_t s[4], std::uint64_t k0, std::uint64_t k1) {
  const std::uint64_t hi0 = mulhi64(kMult0, s[0]);
  const std::uint64_t lo0 = kMult0 * s[0];
  const std::uint64_t hi1 = mulhi64(kMult1, s[2]);
  const std::uint64_t lo1 = kMult1 * s[2];
  s[0] = hi1 ^ s[1] ^ k0;
  s[1] = lo1;
  s[2] = hi0 ^ s[3] ^ k1;
  s[3] = lo0;
}

}  // namespace

Philox4x64::Block Philox4x64::generate(std::uint64_t key0, std::uint64_t key1,
                                       std::uint64_t c0, std::uint64_t c1,
                                       std::uint64_t c2, std::uint64_t c3) {
  std::uint64_t s[4] = {c0, c1, c2, c3};
  std::uint64_t k0 = key0, k1 = key1;
  round_once(s, k0, k1);
  for (int r = 1; r < 10; ++r) {
    k0 += kWeyl0;
    k1 += kWeyl1;
    round_once(s, k0, k1);
  }
  return {s[0], s[1], s[2], s[3]};
}

double u64_to_unit(std::uint64_t w) {
  return static_cast<double>(w >> 11) * 0x1.0p-53;
}

double u64_to_unit_open(std::uint64_t w) {
  return static_cast<double>((w >> 11) + 1) * 0x1.0p-53;
}

double box_muller_cos(std::uint64_t w0, std::uint64_t w1) {
  const double u1 = u64_to_unit_open(w0);
  const double u2 = u64_to_unit(w1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double RandomField::uniform(std::uint64_t i, std::uint64_t j, std::uint64_t k) const {
  return u64_to_unit(Philox4x64::generate(key0_, key1_, i, j, k, 0)[0]);
}

double RandomField::normal(std::uint64_t i, std::uint64_t j, std::uint64_t k) const {
  const auto b = Philox4x64::generate(key0_, key1_, i, j, k, 0);
  return box_muller_cos(b[0], b[1]);
}

double RandomField::sign(std::uint64_t i, std::uint64_t j, std::uint64_t k) const {
  const auto b = Philox4x64::generate(key0_, key1_, i, j, k, 0);
  return (b[0] & 1ULL) ? 1.0 : -1.0;
}

std::uint64_t RandomStream::next_u64() {
  return Philox4x64::generate(key0_, key1_, ctr_++, 0, 0, 1)[0];
}

double RandomStream::uniform() { return u64_to_unit(next_u64()); }

double RandomStream::normal() {
  const auto b = Philox4x64::generate(key0_, key1_, ctr_++, 0, 0, 1);
  return box_muller_cos(b[0], b[1]);
}

std::uint64_t RandomStream::bounded(std::uint64_t n) {
  // Rejection sampling keeps the distribution exactly uniform.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t w;
  do {
    w = next_u64();
  } while (w >= limit);
  return w % n;
}

}  // namespace salasso
