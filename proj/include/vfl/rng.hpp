#pragma once

#include <cstdint>

namespace vfl {

// splitmix64 finalizer. All randomness that can reach an output file goes
// through this so corpora are byte-reproducible across platforms and
// standard library versions.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Independent stream seed for (seed, a, b). Used to key per-output work in
// the batch pipeline so results do not depend on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ splitmix64(a + 0x632be59bd9b4e019ull));
  h = splitmix64(h ^ splitmix64(b + 0x9e6c63d0876a9a47ull));
  return h;
}

// Counter-based fair coin; independent of call order.
constexpr bool coin_flip(std::uint64_t seed, std::uint64_t counter) {
  return (derive_seed(seed, counter, 0xc0f1c0f1c0f1c0f1ull) >> 63) != 0;
}

constexpr double unit_real(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Sequential splitmix64 generator for procedural content.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  double next_unit() { return unit_real(next()); }

  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  std::uint32_t next_below(std::uint32_t n) {
    return static_cast<std::uint32_t>(next() % n);
  }

 private:
  std::uint64_t state_;
};

}  // namespace vfl
