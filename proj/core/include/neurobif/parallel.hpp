#pragma once

#include <cstddef>
#include <functional>

namespace neurobif {

// Worker count: hardware concurrency, capped by NEUROBIF_THREADS when set.
int worker_count();

// Calls body(i) for i in [0, n). Iterations must be independent; results are
// identical to the serial loop because each index writes only its own slot.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace neurobif
