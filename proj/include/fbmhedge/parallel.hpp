#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace fbmhedge {

inline unsigned default_worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

// Static block partition of [0, count). Callers must write results into
// per-index slots; combined with per-index RNG keying this makes every
// result independent of the worker count and schedule.
template <class Fn>
void parallel_for_blocks(std::size_t count, unsigned workers, Fn&& fn) {
  if (count == 0) return;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::size_t>(count, 1024))));
  if (workers == 1) {
    fn(std::size_t{0}, count);
    return;
  }
  const std::size_t block = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = static_cast<std::size_t>(w) * block;
    if (begin >= count) break;
    const std::size_t end = std::min(count, begin + block);
    pool.emplace_back([&, begin, end, w] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace fbmhedge
