#pragma once

#include <cstddef>
#include <functional>

namespace dstft {

/// Upper bound on worker threads for parallel-safe loops. 0 or 1 runs inline.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [begin, end), split into contiguous chunks. Each index
/// is processed by exactly one worker, so results written to disjoint slots are
/// independent of the thread count.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body);

}  // namespace dstft
