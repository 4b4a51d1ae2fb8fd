#pragma once

#include <cmath>
#include <cstdint>

namespace gmclab {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

/// splitmix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Stream tags; one per module so replica streams never collide.
namespace tag {
inline constexpr std::uint64_t kField = 1;
inline constexpr std::uint64_t kCoarse = 2;
inline constexpr std::uint64_t kChaosMinus = 3;
inline constexpr std::uint64_t kSuite = 4;
inline constexpr std::uint64_t kPairs = 5;
}  // namespace tag

/// Derive a flat 64-bit stream seed from (master seed, module tag, replica).
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                                           std::uint64_t replica) {
  std::uint64_t k = mix64(master + kGolden * (tag + 1));
  return mix64(k + kGolden * (replica + 1));
}

/// Counter-based generator: splitmix64 over a keyed counter.  Output is a pure
/// function of (key, draw index), so replicas produce identical streams under
/// any thread layout.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}
  CounterRng(std::uint64_t master, std::uint64_t tag, std::uint64_t replica)
      : key_(derive_seed(master, tag, replica)) {}

  std::uint64_t next_u64() {
    counter_ += kGolden;
    return mix64(key_ + counter_);
  }

  /// Uniform in (0,1); zero avoided so logs are safe.
  double uniform() {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  /// Standard normal, Box-Muller with pair caching.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.28318530717958647692 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gmclab
