#pragma once
// Data-parallel inner loops shared by the emulator, the acquisition rules and
// the Black-Scholes sampler. Each kernel has a scalar reference variant and an
// AVX2/FMA variant; the public entry points dispatch on the level chosen at
// startup (or forced through set_active_level / TAILRISK_SIMD).

#include <cstddef>
#include <cstdint>
#include <span>

namespace tailrisk::simd {

enum class KernelFamily : std::uint8_t { Matern52, Gaussian };

enum class Level : std::uint8_t { Scalar, Avx2 };

// Column-major point block: coordinate j of point i is data[j * stride + i].
struct ColumnPoints {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t stride = 0;
};

struct BsPayoffCoeffs {
  double spot1 = 0.0, spot2 = 0.0;
  double drift1 = 0.0, vol1 = 0.0;                        // log S1 = log z1 + drift1 + vol1*za
  double drift2 = 0.0, vol2a = 0.0, vol2b = 0.0, vol2c = 0.0;  // log S2 = log z2 + drift2 + ...
  double strike1 = 0.0, strike2 = 0.0;
  double weight1 = 0.0, weight2 = 0.0;                    // position * discount factor
};

Level detected_level() noexcept;
Level active_level() noexcept;
void set_active_level(Level level);
const char* level_name(Level level) noexcept;

/// out[i] = sigma2 * prod_j g(|x_j - p_ij| ; theta_j) for every point i of `pts`.
void kernel_row(KernelFamily family, double sigma2, std::span<const double> inv_lengthscale,
                std::span<const double> x, ColumnPoints pts, std::span<double> out);

/// Gaussian density of (mean - level) with variance var + eps2.
void tmse_weights(std::span<const double> mean, std::span<const double> var, double level,
                  double eps2, std::span<double> out);

/// sum_i max(var_i - cov_i^2 * inv_denom, 0) * weight_i
double timse_sum(std::span<const double> var, std::span<const double> cov,
                 std::span<const double> weight, double inv_denom);

void bs_payoff_batch(const BsPayoffCoeffs& c, std::span<const double> za, std::span<const double> zb,
                     std::span<const double> zc, std::span<double> out);

namespace scalar {
void kernel_row(KernelFamily family, double sigma2, std::span<const double> inv_lengthscale,
                std::span<const double> x, ColumnPoints pts, std::span<double> out);
void tmse_weights(std::span<const double> mean, std::span<const double> var, double level,
                  double eps2, std::span<double> out);
double timse_sum(std::span<const double> var, std::span<const double> cov,
                 std::span<const double> weight, double inv_denom);
void bs_payoff_batch(const BsPayoffCoeffs& c, std::span<const double> za, std::span<const double> zb,
                     std::span<const double> zc, std::span<double> out);
}  // namespace scalar

#if defined(TAILRISK_HAVE_AVX2)
namespace avx2 {
void kernel_row(KernelFamily family, double sigma2, std::span<const double> inv_lengthscale,
                std::span<const double> x, ColumnPoints pts, std::span<double> out);
void tmse_weights(std::span<const double> mean, std::span<const double> var, double level,
                  double eps2, std::span<double> out);
double timse_sum(std::span<const double> var, std::span<const double> cov,
                 std::span<const double> weight, double inv_denom);
void bs_payoff_batch(const BsPayoffCoeffs& c, std::span<const double> za, std::span<const double> zb,
                     std::span<const double> zc, std::span<double> out);
}  // namespace avx2
#endif

}  // namespace tailrisk::simd
