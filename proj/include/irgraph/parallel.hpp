#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace irgraph {

// Worker budget: IRGRAPH_THREADS caps parallelism (1 = fully serial);
// otherwise the hardware concurrency is used.
inline int thread_budget() {
  if (const char* env = std::getenv("IRGRAPH_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs f(0..n-1) across the thread budget. f must only touch index-owned
// state, so results are identical to the serial order. The first exception
// wins and is rethrown after all workers drain.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  const std::size_t threads =
      std::min<std::size_t>(static_cast<std::size_t>(thread_budget()), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace irgraph
