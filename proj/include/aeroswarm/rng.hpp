#pragma once
// Deterministic randomness. The engine is std::mt19937_64 (its output sequence
// is pinned by the standard), but every conversion from raw bits to a usable
// draw is done here rather than through std::*_distribution, whose results
// vary across standard libraries. Streams for independent purposes are derived
// from the run seed with a tag + index, so any episode can be replayed without
// serializing engine state.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace aeroswarm {

// splitmix64 step: advances z by the golden-gamma and returns the finalized
// output. Also serves as a stand-alone 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (const char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ull;
  }
  return h;
}

// Child seed for (root, tag, index). Used as derive_seed(run_seed, "users",
// episode) etc. Frozen: changing this breaks replay of every recorded run.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view tag,
                                 std::uint64_t index = 0) {
  return mix64(mix64(root ^ fnv1a64(tag)) ^ mix64(index));
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

  RandomStream(std::uint64_t root, std::string_view tag,
               std::uint64_t index = 0)
      : eng_(derive_seed(root, tag, index)) {}

  std::uint64_t next_u64() { return eng_(); }

  // [0,1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  // Box-Muller; the second variate of each pair is cached.
  double normal(double mean = 0.0, double stddev = 1.0) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + stddev * spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0,1], keeps log() finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return mean + stddev * r * std::cos(theta);
  }

  // Unbiased draw from [0, bound) via Lemire's multiply-shift rejection.
  std::uint64_t uniform_int(std::uint64_t bound) {
    std::uint64_t x = eng_();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
    std::uint64_t lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (lo < threshold) {
        x = eng_();
        m = static_cast<unsigned __int128>(x) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  int uniform_index(int n) {
    return static_cast<int>(uniform_int(static_cast<std::uint64_t>(n)));
  }

  // Fisher–Yates.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace aeroswarm
