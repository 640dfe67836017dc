#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace latmul {

/// Static range split across hardware threads. Work inside each chunk runs in
/// a fixed order, so results do not depend on the thread count.
inline void parallel_for(std::size_t begin, std::size_t end,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
  std::size_t total = end > begin ? end - begin : 0;
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t nthreads = hw ? hw : 1;
  if (nthreads > total) nthreads = total ? total : 1;
  if (nthreads <= 1) {
    fn(begin, end);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(nthreads);
  std::size_t chunk = (total + nthreads - 1) / nthreads;
  for (std::size_t t = 0; t < nthreads; ++t) {
    std::size_t lo = begin + t * chunk;
    std::size_t hi = lo + chunk < end ? lo + chunk : end;
    if (lo >= hi) break;
    workers.emplace_back(fn, lo, hi);
  }
  for (auto& w : workers) w.join();
}

}  // namespace latmul
