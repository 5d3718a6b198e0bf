#pragma once

#include <cstdint>
#include <random>

namespace bgdce {

// splitmix64 step; used to hash (master seed, stream id) pairs into
// independent engine seeds.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t state = master;
  std::uint64_t a = splitmix64_next(state);
  state ^= 0xa0761d6478bd642full * (stream + 1);
  std::uint64_t b = splitmix64_next(state);
  return a ^ b;
}

// mt19937_64 with a hand-built uniform double so streams are identical
// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit mantissa.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in {0, ..., n-1}.
  int next_index(int n) {
    int k = static_cast<int>(next_double() * n);
    return k < n ? k : n - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bgdce
