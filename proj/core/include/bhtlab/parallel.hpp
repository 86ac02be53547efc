#pragma once

#include <cstddef>
#include <functional>

namespace bhtlab {

// Worker cap from BHT_LAB_THREADS (positive integer), else hardware concurrency.
std::size_t worker_count();

// Runs body(i) for i in [0, n). Callers write results into slot i, so output never
// depends on scheduling. The exception from the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace bhtlab
