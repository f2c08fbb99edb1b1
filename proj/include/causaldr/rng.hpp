#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

// Counter-based random number generation (Philox4x32-10). Streams are cheap
// value types derived by hashing a master seed with a path of integers, so
// every (scenario, replicate, purpose) tuple owns an independent sequence
// regardless of scheduling order.
namespace causaldr::rng {

// SplitMix64 finalizer; bijective 64-bit mix.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Hash-chains the parts into a stream key.
std::uint64_t derive_key(std::uint64_t master,
                         std::initializer_list<std::uint64_t> path) noexcept;

std::uint64_t double_bits(double x) noexcept;

// Purpose tags kept distinct so streams for different uses never collide.
namespace tag {
inline constexpr std::uint64_t kCovariates = 0x636f7661;
inline constexpr std::uint64_t kTreatment = 0x74726561;
inline constexpr std::uint64_t kNoise = 0x6e6f6973;
inline constexpr std::uint64_t kData = 0x64617461;
inline constexpr std::uint64_t kForest = 0x666f7265;
inline constexpr std::uint64_t kSvm = 0x73766d00;
inline constexpr std::uint64_t kBootstrap = 0x626f6f74;
inline constexpr std::uint64_t kAttempt = 0x61747470;
}  // namespace tag

// One round applies the Philox4x32 bijection to a 128-bit counter under a
// 64-bit key; ten rounds per block.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

class Stream {
 public:
  Stream() : Stream(0) {}
  explicit Stream(std::uint64_t key)
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double next_double();

  // Uniform integer in [0, n); n must be positive.
  std::uint64_t next_index(std::uint64_t n);

  bool next_bernoulli(double p) { return next_double() < p; }

  // Standard normal via Box-Muller; generated in pairs, second value cached.
  double next_normal();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_{0, 0, 0, 0};
  std::array<std::uint32_t, 4> block_{};
  int block_pos_ = 4;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

inline Stream derive_stream(std::uint64_t master,
                            std::initializer_list<std::uint64_t> path) {
  return Stream(derive_key(master, path));
}

}  // namespace causaldr::rng
