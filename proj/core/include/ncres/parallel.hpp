#pragma once

#include <cstddef>
#include <functional>

namespace ncres {

// Runs body(i) for i in [0, count) on up to `threads` workers (0: hardware count).
// Each index is handled exactly once; callers write results into slot i, so any
// later reduction runs in index order regardless of the thread count. The first
// exception thrown by a worker is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

unsigned default_threads();
void set_default_threads(unsigned t);

}  // namespace ncres
