#pragma once

#include <cstdint>
#include <functional>

namespace udc {

// Worker count: min(hardware_concurrency, UDC_THREADS if set). At least 1.
int thread_count();

// Splits [begin, end) into contiguous chunks, one per worker, and runs
// fn(i) for every index. Chunks are disjoint so writes to per-index output
// slots race-free; callers must not fold into shared accumulators from fn.
// Results are bit-identical for any worker count because the work per index
// does not depend on the partition.
void parallel_for(int64_t begin, int64_t end,
                  const std::function<void(int64_t)>& fn);

}  // namespace udc
