#pragma once

#include <cstdint>
#include <random>

namespace scb {

// Derives an independent stream seed from (master, index) with the SplitMix64
// finalizer. Streams for new indices never perturb existing ones, so adding
// runs to an experiment leaves earlier runs' draws untouched.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Sub-stream indices used throughout the harness. A run derives its seed as
// derive_seed(master_seed, run_index), then derives per-role streams from
// that run seed with these indices.
enum class StreamRole : std::uint64_t {
  Agent = 1,          // exploration draws of the primary (contextual) policy
  Environment = 2,    // dataset shuffling / row sampling
  Noncontextual = 3,  // exploration draws of the noncontextual constituent
};

// Deterministic random stream. std::mt19937_64 underneath (the generator is
// fully specified by the standard), with hand-rolled samplers because the
// standard library's distributions are implementation-defined and would break
// the identical-seed => identical-sequence contract across toolchains.
//
// Sampler algorithms, fixed so ports can reproduce the distributions:
//   uniform    53-bit draw: (next_u64() >> 11) * 2^-53, in [0, 1)
//   normal     Box-Muller: sqrt(-2 ln u1) * cos(2 pi u2), u1 in (0, 1]
//   gamma      Marsaglia-Tsang squeeze for shape >= 1;
//              shape < 1 boosted via gamma(shape + 1) * u^(1/shape)
//   beta       gamma(a) / (gamma(a) + gamma(b))
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  static RngStream for_run(std::uint64_t master_seed, std::uint64_t run_index);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  /// Uniform double in [0, 1).
  double uniform();

  /// Uniform integer in [0, n); unbiased via rejection. Requires n > 0.
  std::int64_t uniform_int(std::int64_t n);

  /// Standard normal draw.
  double normal();

  /// Gamma draw with the given shape and unit scale. Requires shape > 0.
  double gamma(double shape);

  /// Beta(a, b) draw. Requires a > 0 and b > 0.
  double beta(double a, double b);

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace scb
