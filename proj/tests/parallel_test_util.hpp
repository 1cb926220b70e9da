#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace qrivx::testing {

// two-worker helper for the heavier Monte Carlo style unit tests
template <typename Fn>
void run_indexed(int n, Fn&& fn) {
  unsigned workers = std::thread::hardware_concurrency();
  if (workers < 1) workers = 1;
  if (workers > 4) workers = 4;
  std::atomic<int> next{0};
  auto loop = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w + 1 < workers; ++w) pool.emplace_back(loop);
  loop();
  for (auto& t : pool) t.join();
}

}  // namespace qrivx::testing
