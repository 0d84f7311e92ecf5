#include "toda/rng.hpp"

#include <cmath>
#include <numbers>

namespace toda {

namespace {

constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kMult1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

inline std::array<std::uint64_t, 4> round_once(const std::array<std::uint64_t, 4>& ctr,
                                               const std::array<std::uint64_t, 2>& key) {
  std::uint64_t hi0, lo0, hi1, lo1;
  mulhilo(kMult0, ctr[0], hi0, lo0);
  mulhilo(kMult1, ctr[2], hi1, lo1);
  return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

inline double uniform_open(std::uint64_t bits) {
  // 53-bit mantissa, strictly inside (0, 1].
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& counter,
                                        const std::array<std::uint64_t, 2>& key) {
  std::array<std::uint64_t, 4> ctr = counter;
  std::array<std::uint64_t, 2> k = key;
  ctr = round_once(ctr, k);
  for (int r = 1; r < 10; ++r) {
    k[0] += kWeyl0;
    k[1] += kWeyl1;
    ctr = round_once(ctr, k);
  }
  return ctr;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  // splitmix64 finalizer over seed xor tag.
  std::uint64_t z = seed ^ (tag * 0x9E3779B97F4A7C15ull);
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

GaussianStream::GaussianStream(std::uint64_t seed, std::uint64_t stream)
    : key_{seed, stream}, stream_(stream) {}

void GaussianStream::refill() {
  const std::array<std::uint64_t, 4> words = philox4x64({block_, stream_, 0, 0}, key_);
  ++block_;
  const double u1 = uniform_open(words[0]);
  const double u2 = uniform_open(words[1]);
  const double u3 = uniform_open(words[2]);
  const double u4 = uniform_open(words[3]);
  const double r1 = std::sqrt(-2.0 * std::log(u1));
  const double r2 = std::sqrt(-2.0 * std::log(u3));
  const double a1 = 2.0 * std::numbers::pi * u2;
  const double a2 = 2.0 * std::numbers::pi * u4;
  cache_ = {r1 * std::cos(a1), r1 * std::sin(a1), r2 * std::cos(a2), r2 * std::sin(a2)};
  cached_ = 4;
}

double GaussianStream::next() {
  if (cached_ == 0) refill();
  return cache_[4 - cached_--];
}

void GaussianStream::fill(std::span<double> out) {
  for (double& x : out) x = next();
}

}  // namespace toda
