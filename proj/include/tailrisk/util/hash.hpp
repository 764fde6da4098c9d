#pragma once

#include <cstdint>
#include <string_view>

namespace tailrisk {

/// SplitMix64 finalizer; a bijective avalanche mix of one 64-bit word.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Order-dependent combination of two keys into a new well-mixed key.
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept;

/// FNV-1a over bytes; used for config fingerprints.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace tailrisk
