// SPDX-License-Identifier: Apache-2.0
#include "oed/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace oed::par {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int count) { g_max_threads.store(count < 0 ? 0 : count); }

int max_threads() {
  const int cap = g_max_threads.load();
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int base = hw > 0 ? hw : 1;
  return cap > 0 ? std::min(cap, base) : base;
}

void parallel_for(Index n, const std::function<void(Index)>& fn) {
  if (n <= 0) return;
  const int workers = static_cast<int>(std::min<Index>(n, max_threads()));
  if (workers <= 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<Index> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto body = [&] {
    for (;;) {
      const Index i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers) - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(body);
  body();
  for (auto& thread : pool) thread.join();

  if (error) std::rethrow_exception(error);
}

}  // namespace oed::par
