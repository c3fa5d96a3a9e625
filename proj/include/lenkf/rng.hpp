#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Core>

namespace lenkf {

// Philox 4x32-10 counter-based generator (Salmon et al., SC 2011).
// A block is a pure function of (key, counter), so any draw can be
// reproduced from its address alone, independent of execution order.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 2>& key,
                                        std::array<std::uint32_t, 4> counter);

// splitmix64 finalizer, used to derive per-cell seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

// Stream address tags. Streams with different purposes are disjoint by
// construction; the same (purpose, time, entity) address always yields
// the same draws no matter which thread consumes it.
enum class StreamPurpose : std::uint32_t {
  signal_init = 1,
  signal_noise = 2,
  obs_noise = 3,
  ensemble_init = 4,
  sample_xi = 5,     // per-member forecast noise
  sample_zeta = 6,   // per-member observation perturbations
  concentration = 7,
  generic = 8,
};

// Deterministic N(0,1) substream addressed by (seed, purpose, time, entity).
// Draw order within a substream is fixed; draws come from Box-Muller pairs
// over Philox blocks.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t time,
              std::uint64_t entity = 0);

  double gaussian();
  Eigen::VectorXd gaussian_vector(Eigen::Index n);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 3> prefix_;
  std::uint32_t block_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lenkf
