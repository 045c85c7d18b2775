#include "normalis/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace normalis {

namespace {
std::atomic<unsigned> g_workers{1};
constexpr std::size_t kChunk = 16;
}  // namespace

unsigned default_workers() { return g_workers.load(); }
void set_default_workers(unsigned workers) { g_workers.store(std::max(1u, workers)); }

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>((n + kChunk - 1) / kChunk)));
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> first_failure{n};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto run = [&]() {
    for (;;) {
      const std::size_t begin = next.fetch_add(kChunk);
      if (begin >= n) return;
      const std::size_t end = std::min(n, begin + kChunk);
      for (std::size_t i = begin; i < end; ++i) {
        if (i > first_failure.load()) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (i < first_failure.load()) {
            first_failure.store(i);
            failure = std::current_exception();
          }
          return;
        }
      }
    }
  };

  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace normalis
