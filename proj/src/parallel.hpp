#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace gaitkit {

// Runs fn(i) for i in [0, n) across hardware threads. Each task owns its
// output slot, so results are independent of scheduling order.
template <typename Fn>
void parallel_for_n(std::size_t n, bool parallel, Fn&& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (!parallel || n < 2 || hw == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(hw, n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&fn, w, workers, n] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace gaitkit
