#pragma once

#include <cstddef>
#include <functional>

namespace wqmc {

/// Worker count used by every parallel loop in the library; defaults to 1.
void set_thread_count(unsigned n);
unsigned thread_count() noexcept;

/// Calls body(begin, end) on contiguous chunks covering [0, n). Chunk boundaries
/// depend only on n and `grain`, never on the thread count. The first exception
/// thrown by any chunk is rethrown after all workers join.
void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace wqmc
