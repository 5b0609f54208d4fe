#pragma once

#include <cstddef>
#include <functional>

namespace phasesync {

// Worker cap: PHASESYNC_THREADS when set (>= 1), hardware concurrency otherwise.
std::size_t max_threads();

// Runs fn(i) for i in [0, n). Each index must touch disjoint state; the
// schedule is unspecified, so outputs must not depend on completion order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace phasesync
