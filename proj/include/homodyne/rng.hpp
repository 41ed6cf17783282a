#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace homodyne {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of sub-stream `stream` under master seed `seed`.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

/// Reproducible random stream: mt19937_64 seeded with
/// substream_seed(seed, stream).  Independent streams for parallel work are
/// obtained by varying `stream`; a given (seed, stream) pair always yields the
/// same sequence.  Uniform doubles are built from the top 53 bits of each
/// engine output, so they do not depend on the standard library's
/// distribution implementations.
class RandomStream {
 public:
  static constexpr std::string_view kName = "mt19937_64+splitmix64-substreams";

  using result_type = std::mt19937_64::result_type;

  RandomStream(std::uint64_t seed, std::uint64_t stream) : engine_(substream_seed(seed, stream)) {}

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    const double u = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    return u < 1.0 ? u : 0x1.fffffffffffffp-1;  // the top value rounds up to 1
  }

  // UniformRandomBitGenerator interface, for use with <random> distributions.
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace homodyne
