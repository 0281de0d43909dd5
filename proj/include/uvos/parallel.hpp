#pragma once

#include <functional>
#include <thread>
#include <vector>

#include <Eigen/Core>

namespace uvos {

// Chunked parallel loop over [0, n). Each index is processed exactly once;
// callers write into per-index slots so results are deterministic regardless
// of the thread count.
inline void parallel_for(Eigen::Index n, int threads,
                         const std::function<void(Eigen::Index)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (Eigen::Index i = 0; i < n; ++i) fn(i);
    return;
  }
  const int workers = static_cast<int>(std::min<Eigen::Index>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      for (Eigen::Index i = t; i < n; i += workers) fn(i);
    });
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace uvos
