#pragma once

#include <cstddef>
#include <functional>

namespace isrsgn {

/// Worker count from the ISRSGN_THREADS environment variable, else the
/// hardware concurrency (at least 1).
unsigned default_thread_count();

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0: default).
/// Each index runs exactly once; the first exception is rethrown after all
/// workers have stopped.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace isrsgn
