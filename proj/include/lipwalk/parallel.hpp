#pragma once

#include <cstddef>
#include <functional>

namespace lipwalk {

/// Worker count for library-internal fan-out (basis columns, Monte Carlo
/// paths when the caller passes 0). 0 restores the hardware default.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls fn(i) for i in [0, n) on up to thread_count() workers. Each index
/// runs exactly once; the first exception thrown is rethrown after all
/// workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace lipwalk
