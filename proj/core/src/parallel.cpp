#include "peer/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace peer {

void parallel_for(Index num_workers, Index num_tasks,
                  const std::function<void(Index)>& body) {
  if (num_workers < 1) {
    throw InvalidInputError("parallel_for: worker count must be >= 1");
  }
  if (num_tasks <= 0) return;

  const Index workers = std::min(num_workers, num_tasks);
  if (workers == 1) {
    for (Index t = 0; t < num_tasks; ++t) body(t);
    return;
  }

  std::atomic<Index> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto run = [&] {
    for (;;) {
      const Index t = next.fetch_add(1, std::memory_order_relaxed);
      if (t >= num_tasks) return;
      try {
        body(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (Index w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

Index resolve_thread_count(std::optional<Index> requested) {
  if (!requested.has_value()) {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<Index>(hw);
  }
  if (*requested < 1) {
    throw InvalidInputError("thread count must be >= 1");
  }
  return *requested;
}

}  // namespace peer
