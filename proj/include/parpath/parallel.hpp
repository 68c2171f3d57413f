#pragma once

#include <cstddef>
#include <functional>

namespace parpath {

/// Worker count: explicit override, else PARPATH_THREADS, else hardware concurrency.
std::size_t thread_count();
/// 0 restores the environment/hardware default.
void set_thread_count(std::size_t n);

/// Runs body(i) for i in [0, n) on static contiguous chunks. Callers write to
/// per-index slots only, so results never depend on the worker count. The first
/// exception thrown by any worker is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace parpath
