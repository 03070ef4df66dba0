// Deterministic substream random number generation.
//
// Every stochastic quantity in the simulator (channel entries, data symbols,
// receiver noise) is drawn from a SubstreamRng keyed by (seed, stream tag,
// counter).  Streams are independent of each other and of evaluation order,
// so serial and multi-worker runs produce bit-identical results.

#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace ccipm {

// Stream tags. One tag per independent random quantity.
inline constexpr std::uint64_t kChannelStream = 0x6368616e6e656cULL;
inline constexpr std::uint64_t kSymbolStream = 0x73796d626f6cULL;
inline constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;
inline constexpr std::uint64_t kTestStream = 0x74657374ULL;

class SubstreamRng {
 public:
  SubstreamRng(std::uint64_t seed, std::uint64_t stream_tag, std::uint64_t index);

  // Uniform double in [0, 1).
  double uniform();

  // Uniform integer in [0, bound), bound >= 1. Unbiased (rejection).
  std::uint64_t uniform_int(std::uint64_t bound);

  // Circularly-symmetric complex Gaussian with E|z|^2 = variance
  // (variance/2 per real and imaginary part). Polar method, consumes
  // exactly two uniforms.
  std::complex<double> complex_normal(double variance);

 private:
  std::mt19937_64 gen_;
};

}  // namespace ccipm
