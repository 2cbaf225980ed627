#pragma once

#include <cstddef>
#include <functional>

namespace rayorder {

/// Process-wide worker count for parallel helpers. 0 restores the hardware
/// default. Results of all library operations are identical for any setting;
/// only wall time changes.
void set_worker_threads(unsigned n);
unsigned worker_threads();

/// Run fn(begin, end) over disjoint chunks of [0, n), possibly on several
/// threads. Chunk boundaries depend only on n and the worker count.
void parallel_for_chunks(size_t n, const std::function<void(size_t, size_t)>& fn);

} // namespace rayorder
