#pragma once

#include <cstddef>
#include <functional>

namespace cand {

/// `requested`, or the hardware concurrency when 0 (at least 1).
std::size_t resolve_threads(std::size_t requested);

/// Runs fn(0..n-1) on up to `threads` workers. Each index is processed
/// exactly once; results must be written to per-index slots. The exception
/// of the lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace cand
