#include "scb/rng.hpp"

#include <cmath>
#include <limits>

#include "scb/types.hpp"

namespace scb {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kInv2Pow53 = 0x1.0p-53;
}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  // SplitMix64 finalizer over master advanced by (index + 1) golden-gamma
  // steps. index + 1 keeps derive_seed(m, 0) != splitmix(m) collisions away
  // from the common "seed 0, run 0" case.
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), gen_(seed) {}

RngStream RngStream::for_run(std::uint64_t master_seed, std::uint64_t run_index) {
  return RngStream(derive_seed(master_seed, run_index));
}

std::uint64_t RngStream::next_u64() { return gen_(); }

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * kInv2Pow53;
}

std::int64_t RngStream::uniform_int(std::int64_t n) {
  if (n <= 0) throw ConfigError("uniform_int: n must be positive");
  const auto un = static_cast<std::uint64_t>(n);
  // Reject the tail that would bias the modulus.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % un;
  std::uint64_t v = next_u64();
  while (v >= limit) v = next_u64();
  return static_cast<std::int64_t>(v % un);
}

double RngStream::normal() {
  // Box-Muller; u1 shifted into (0, 1] so log() stays finite.
  const double u1 =
      static_cast<double>((next_u64() >> 11) + 1) * kInv2Pow53;
  const double u2 = static_cast<double>(next_u64() >> 11) * kInv2Pow53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) throw ConfigError("gamma: shape must be positive");
  if (shape < 1.0) {
    const double u =
        static_cast<double>((next_u64() >> 11) + 1) * kInv2Pow53;  // (0, 1]
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw ConfigError("beta: shape parameters must be positive");
  }
  const double x = gamma(a);
  const double y = gamma(b);
  const double s = x + y;
  if (s <= 0.0) return 0.5;  // both draws underflowed; only possible for tiny shapes
  return x / s;
}

}  // namespace scb
