#pragma once

#include <cstddef>
#include <functional>

namespace afem {

/// Upper bound on worker threads for per-entity loops. Defaults to
/// min(hardware threads, AFEM2D_THREADS) and can be pinned to 1 for the
/// deterministic single-threaded mode.
std::size_t max_threads();
void set_max_threads(std::size_t n);

/// Runs body(begin, end) over contiguous chunks of [0, n). Each index is owned
/// by exactly one chunk, so bodies that only write per-index outputs produce
/// identical results for every thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 2048);

}  // namespace afem
