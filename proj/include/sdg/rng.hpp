#ifndef SDG_RNG_HPP_
#define SDG_RNG_HPP_

#include <cmath>
#include <cstdint>

namespace sdg {

// Deterministic generator with hand-rolled variate transforms so that output
// streams are identical across standard libraries. xoshiro256** core seeded
// through splitmix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : state_) w = splitmix64(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on (0, 1); never returns 0 so log() is always safe.
  double uniform() {
    std::uint64_t bits = next_u64() >> 11;  // 53 bits
    return (double(bits) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  double normal(double mean, double stddev) {
    if (!have_spare_) {
      double u1 = uniform();
      double u2 = uniform();
      double r = std::sqrt(-2.0 * std::log(u1));
      spare_ = r * std::sin(6.283185307179586476925286766559 * u2);
      have_spare_ = true;
      return mean + stddev * r *
                        std::cos(6.283185307179586476925286766559 * u2);
    }
    have_spare_ = false;
    return mean + stddev * spare_;
  }

  // Exact Poisson sampling: inversion by multiplication for small means,
  // Hormann's PTRS transformed rejection otherwise. No normal approximation.
  std::uint64_t poisson(double mean);

  // Marsaglia-Tsang; exact for all shape > 0.
  double gamma(double shape, double scale);

  // Number of failures before the r-th success, success probability p.
  // Sampled as a gamma-Poisson mixture.
  std::uint64_t negative_binomial(double r, double p) {
    double lambda = gamma(r, (1.0 - p) / p);
    return poisson(lambda);
  }

  // Stable sub-stream derivation: mixes the tag into a fresh seed without
  // disturbing this generator's own stream.
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL + tag);
    splitmix64(x);
    return splitmix64(x);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace sdg

#endif  // SDG_RNG_HPP_
