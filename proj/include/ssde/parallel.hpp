#pragma once

#include <cstddef>
#include <functional>

namespace ssde {

/// Worker count from SSDE_THREADS, defaulting to the hardware concurrency.
int thread_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Each index is
/// visited exactly once; results written per index are therefore
/// independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace ssde
