#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace crad {

/// Worker count used by parallel_for. Starts at the CORNER_RADIANCE_THREADS
/// environment value when set, otherwise 1.
unsigned thread_count();
void set_thread_count(unsigned n);

/// Thread count requested through CORNER_RADIANCE_THREADS, or 0 when unset/invalid.
unsigned env_thread_count();

/// Runs body(i) for i in [0, n) on a static block partition. Each index is
/// handled by exactly one worker and writes only its own slot, so results never
/// depend on the number of threads. The exception of the lowest failing index
/// is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  auto run_block = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(run_block, begin, end);
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace crad
