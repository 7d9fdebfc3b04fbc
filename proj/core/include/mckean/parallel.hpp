#ifndef MCKEAN_PARALLEL_HPP
#define MCKEAN_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace mckean {

// Worker count: hardware concurrency, capped by MCKEAN_LAB_THREADS if set.
std::size_t worker_count();

// Runs body(i) for i in [0, count). Iterations must be independent; results
// are expected to be written to per-index slots so that the outcome does not
// depend on the schedule. The first exception thrown by any iteration is
// rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace mckean

#endif  // MCKEAN_PARALLEL_HPP
