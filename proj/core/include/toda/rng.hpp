#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace toda {

// Philox 4x64, 10 rounds. Pure function of (counter, key): replicas keyed
// by counter/key never share state, so parallel draws are reproducible
// independently of scheduling.
std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& counter,
                                        const std::array<std::uint64_t, 2>& key);

// Stable derivation of sub-seeds for independent estimator legs.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

// Standard normals from Box-Muller over Philox output. The stream is a
// pure function of (seed, stream, position); `stream` is the replica index.
class GaussianStream {
public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream);

  double next();
  void fill(std::span<double> out);

private:
  void refill();

  std::array<std::uint64_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<double, 4> cache_{};
  int cached_ = 0;
};

}  // namespace toda
