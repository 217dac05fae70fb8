#pragma once

#include <cstddef>
#include <functional>

namespace pulsekit {

/// Worker count used by the per-window loops. Defaults to 1. Results never
/// depend on this value: every parallel loop writes disjoint outputs and
/// keeps its reductions in a fixed order.
void set_thread_count(unsigned n) noexcept;
unsigned thread_count() noexcept;

/// Calls body(begin, end) on contiguous blocks covering [0, n).
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t begin, std::size_t end)>& body);

}  // namespace pulsekit
