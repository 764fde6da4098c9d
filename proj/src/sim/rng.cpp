#include "tailrisk/sim/rng.hpp"

#include "tailrisk/util/hash.hpp"

namespace tailrisk {

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) noexcept {
  std::uint64_t x = seed;
  for (auto& w : s_) {
    x += 0x9e3779b97f4a7c15ULL;
    w = splitmix64(x);
  }
}

Xoshiro256::result_type Xoshiro256::operator()() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform() noexcept {
  // 53 random bits, shifted off zero.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double Xoshiro256::normal() { return normal_(*this); }

std::uint64_t scenario_stream(std::uint64_t run_seed, std::uint64_t scenario) noexcept {
  return hash_combine(run_seed, scenario);
}

Xoshiro256 draw_rng(std::uint64_t stream, std::uint64_t draw) noexcept {
  return Xoshiro256(hash_combine(stream, draw));
}

std::uint64_t replication_seed(std::uint64_t master, std::uint64_t rep) noexcept {
  return hash_combine(master ^ 0x5eedULL, rep);
}

}  // namespace tailrisk
