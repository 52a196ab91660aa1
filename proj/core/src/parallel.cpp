#include "chcrit/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace chcrit {

namespace {

std::atomic<int> g_workers{0};  // 0 = unset, use hardware concurrency

int hardware_workers() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace

int worker_count() {
  int w = g_workers.load();
  return w > 0 ? w : hardware_workers();
}

void set_worker_count(int k) { g_workers.store(std::max(1, k)); }

void parallel_for(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  int w = std::min(worker_count(), n);
  if (w == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }

  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto body = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(w - 1);
  for (int t = 0; t < w - 1; ++t) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();

  for (int i = 0; i < n; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);
}

}  // namespace chcrit
