#include "mpis/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace mpis {

int maxThreads() {
  if (const char* env = std::getenv("MPI_STEREO_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallelFor(int begin, int end, const std::function<void(int, int)>& fn,
                 int threads) {
  int count = end - begin;
  if (count <= 0) return;
  int nThreads = threads > 0 ? threads : maxThreads();
  nThreads = std::min(nThreads, count);
  if (nThreads <= 1) {
    fn(begin, end);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nThreads);
  int chunk = (count + nThreads - 1) / nThreads;
  for (int t = 0; t < nThreads; ++t) {
    int lo = begin + t * chunk;
    int hi = std::min(lo + chunk, end);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace mpis
