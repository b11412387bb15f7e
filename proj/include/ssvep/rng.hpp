#ifndef SSVEP_RNG_HPP
#define SSVEP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

namespace ssvep {

// Counter-free deterministic RNG. SplitMix64 seeds a xoshiro256** state so
// that independent streams can be derived from (seed, purpose-string) pairs
// without any global state. Output is identical on every platform, unlike
// std::normal_distribution.
class Rng {
public:
  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& s : state_) s = splitmix64(x);
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  uint64_t below(uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller (pair cached).
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  double gaussian(double mean, double sd) { return mean + sd * gaussian(); }

  // Exponential inter-arrival time with the given rate (events per unit).
  double exponential(double rate) {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return -std::log(u) / rate;
  }

  static uint64_t splitmix64(uint64_t& x) {
    uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // FNV-1a over the purpose string mixed into the seed; used to derive
  // independent per-module streams from one master seed.
  static uint64_t derive(uint64_t seed, std::string_view purpose) {
    uint64_t h = 1469598103934665603ULL;
    for (const char c : purpose) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
    uint64_t x = seed ^ h;
    return splitmix64(x);
  }

  static uint64_t derive(uint64_t seed, std::string_view purpose, uint64_t a,
                         uint64_t b = 0, uint64_t c = 0) {
    uint64_t h = derive(seed, purpose);
    uint64_t x = h ^ (a * 0x9e3779b97f4a7c15ULL);
    h = splitmix64(x);
    x = h ^ (b * 0xbf58476d1ce4e5b9ULL);
    h = splitmix64(x);
    x = h ^ (c * 0x94d049bb133111ebULL);
    return splitmix64(x);
  }

private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t state_[4];
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace ssvep

#endif  // SSVEP_RNG_HPP
