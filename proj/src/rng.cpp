#include "lenkf/rng.hpp"

#include <cmath>

namespace lenkf {

namespace {

constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85u;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                      std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         std::array<std::uint32_t, 2>& key) {
  std::uint32_t lo0, hi0, lo1, hi1;
  mul_hi_lo(kPhiloxM4x32A, ctr[0], lo0, hi0);
  mul_hi_lo(kPhiloxM4x32B, ctr[2], lo1, hi1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  key[0] += kPhiloxW32A;
  key[1] += kPhiloxW32B;
}

// 53-bit uniform in (0,1]; never 0, so the log below is safe.
inline double u64_to_unit(std::uint64_t x) {
  return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 2>& key,
                                        std::array<std::uint32_t, 4> counter) {
  std::array<std::uint32_t, 2> k = key;
  for (int round = 0; round < 10; ++round) {
    philox_round(counter, k);
  }
  return counter;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

NoiseStream::NoiseStream(std::uint64_t seed, StreamPurpose purpose,
                         std::uint64_t time, std::uint64_t entity)
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)},
      prefix_{static_cast<std::uint32_t>(purpose) ^
                  (static_cast<std::uint32_t>(time >> 32) << 8) ^
                  (static_cast<std::uint32_t>(entity >> 32) << 16),
              static_cast<std::uint32_t>(time),
              static_cast<std::uint32_t>(entity)} {}

double NoiseStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const auto bits =
      philox4x32(key_, {prefix_[0], prefix_[1], prefix_[2], block_++});
  const std::uint64_t a = (static_cast<std::uint64_t>(bits[0]) << 32) | bits[1];
  const std::uint64_t b = (static_cast<std::uint64_t>(bits[2]) << 32) | bits[3];
  const double radius = std::sqrt(-2.0 * std::log(u64_to_unit(a)));
  const double angle = 2.0 * M_PI * u64_to_unit(b);
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Eigen::VectorXd NoiseStream::gaussian_vector(Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = gaussian();
  }
  return v;
}

}  // namespace lenkf
