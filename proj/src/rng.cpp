#include "ccipm/rng.hpp"

#include <cmath>

namespace ccipm {

namespace {

// splitmix64 finalizer; mixes the key triple into one seeding word.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

SubstreamRng::SubstreamRng(std::uint64_t seed, std::uint64_t stream_tag,
                           std::uint64_t index)
    : gen_(mix64(mix64(mix64(seed) ^ stream_tag) ^ index)) {}

double SubstreamRng::uniform() {
  // 53-bit mantissa from the top bits of one 64-bit draw.
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

std::uint64_t SubstreamRng::uniform_int(std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = gen_();
  } while (x >= limit);
  return x % bound;
}

std::complex<double> SubstreamRng::complex_normal(double variance) {
  // |z|^2 ~ Exp(mean = variance), phase uniform.
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-variance * std::log(u1));
  const double phi = 2.0 * M_PI * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace ccipm
