#pragma once

#include <cstddef>
#include <functional>

namespace tailrisk {

/// Worker count used by parallel_for. Defaults to TAILRISK_THREADS when set,
/// otherwise the hardware concurrency.
std::size_t thread_count() noexcept;
void set_thread_count(std::size_t n);

/// Calls body(i) for i in [0, n). Work is split into contiguous chunks; the
/// body must only write to slots owned by index i so results do not depend on
/// the number of workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace tailrisk
