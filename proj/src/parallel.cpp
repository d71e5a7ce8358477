#include "svolterra/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace svolterra::parallel {

namespace {
std::atomic<std::size_t> g_threads{1};
}

void set_threads(std::size_t threads) { g_threads = std::max<std::size_t>(1, threads); }

std::size_t threads() { return g_threads; }

void for_each_index(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(threads(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace svolterra::parallel
