#ifndef MPIS_PARALLEL_HPP
#define MPIS_PARALLEL_HPP

#include <functional>

namespace mpis {

/// Worker-pool width: MPI_STEREO_THREADS when set (>=1), else hardware
/// concurrency.
int maxThreads();

/// Runs fn(begin..end) split into contiguous chunks across the pool.
/// Each index is processed exactly once by exactly one thread, so writes to
/// disjoint per-index data need no synchronization and results are
/// independent of the thread count.
void parallelFor(int begin, int end, const std::function<void(int, int)>& fn,
                 int threads = 0);

}  // namespace mpis

#endif
