#pragma once

#include <cstddef>
#include <functional>

namespace mmdscan {

// Worker count implied by a threads knob: 0 = auto (hardware concurrency).
unsigned resolve_threads(unsigned threads);

// Runs fn(i) for every i in [0, count). Callers must write results into
// per-index slots so the observable output is independent of partitioning.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace mmdscan
