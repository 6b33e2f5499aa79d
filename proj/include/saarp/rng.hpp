#pragma once

#include <cstdint>
#include <random>

namespace saarp {

// Seeded random stream. Parallel workers must each own a stream derived
// from (base_seed, stream_id) so that replications consume disjoint
// sequences regardless of scheduling order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(mix(seed)), eng_(seed_) {}

  RngStream(std::uint64_t base_seed, std::uint64_t stream_id)
      : seed_(mix(mix(base_seed) ^ mix(stream_id + 0x5851f42d4c957f2dULL))),
        eng_(seed_) {}

  // Disjoint sub-stream, e.g. one per replication or per round.
  RngStream substream(std::uint64_t id) const { return RngStream(seed_, id); }

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1).
  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(eng_);
  }

  double uniform_real(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }

  // Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(eng_);
  }

  std::size_t uniform_index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng_);
  }

  double exponential() {
    return std::exponential_distribution<double>(1.0)(eng_);
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  // splitmix64; spreads consecutive seeds across the whole state space.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 eng_;
};

}  // namespace saarp
