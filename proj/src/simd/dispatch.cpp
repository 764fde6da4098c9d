#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "tailrisk/simd/kernels.hpp"

namespace tailrisk::simd {

namespace {

Level probe() noexcept {
#if defined(TAILRISK_HAVE_AVX2)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return Level::Avx2;
  }
#endif
  return Level::Scalar;
}

Level initial_level() noexcept {
  const Level hw = probe();
  if (const char* env = std::getenv("TAILRISK_SIMD")) {
    if (std::string_view(env) == "scalar") return Level::Scalar;
  }
  return hw;
}

std::atomic<Level>& current() {
  static std::atomic<Level> level{initial_level()};
  return level;
}

}  // namespace

Level detected_level() noexcept {
  static const Level hw = probe();
  return hw;
}

Level active_level() noexcept { return current().load(std::memory_order_relaxed); }

void set_active_level(Level level) {
  if (level == Level::Avx2 && detected_level() != Level::Avx2) {
    throw std::invalid_argument("AVX2 kernels are not available on this CPU/build");
  }
  current().store(level, std::memory_order_relaxed);
}

const char* level_name(Level level) noexcept {
  return level == Level::Avx2 ? "avx2" : "scalar";
}

#if defined(TAILRISK_HAVE_AVX2)
#define TAILRISK_DISPATCH(fn, ...)                              \
  do {                                                          \
    if (active_level() == Level::Avx2) return avx2::fn(__VA_ARGS__); \
    return scalar::fn(__VA_ARGS__);                             \
  } while (0)
#else
#define TAILRISK_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

void kernel_row(KernelFamily family, double sigma2, std::span<const double> inv_lengthscale,
                std::span<const double> x, ColumnPoints pts, std::span<double> out) {
  TAILRISK_DISPATCH(kernel_row, family, sigma2, inv_lengthscale, x, pts, out);
}

void tmse_weights(std::span<const double> mean, std::span<const double> var, double level,
                  double eps2, std::span<double> out) {
  TAILRISK_DISPATCH(tmse_weights, mean, var, level, eps2, out);
}

double timse_sum(std::span<const double> var, std::span<const double> cov,
                 std::span<const double> weight, double inv_denom) {
  TAILRISK_DISPATCH(timse_sum, var, cov, weight, inv_denom);
}

void bs_payoff_batch(const BsPayoffCoeffs& c, std::span<const double> za, std::span<const double> zb,
                     std::span<const double> zc, std::span<double> out) {
  TAILRISK_DISPATCH(bs_payoff_batch, c, za, zb, zc, out);
}

}  // namespace tailrisk::simd
