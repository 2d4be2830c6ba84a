#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ltfbm {

/// Runs fn(i) for i in [0, n) on `threads` workers. Each index is handled
/// exactly once and fn must write only to slot i, so results do not depend on
/// the worker count. The exception from the lowest failing index is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (n == 0) return;
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errs(threads);
  std::vector<std::size_t> err_idx(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = n * w / threads;
      const std::size_t hi = n * (w + 1) / threads;
      for (std::size_t i = lo; i < hi; ++i) {
        try {
          fn(i);
        } catch (...) {
          errs[w] = std::current_exception();
          err_idx[w] = i;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  std::size_t best = n;
  std::exception_ptr first;
  for (unsigned w = 0; w < threads; ++w) {
    if (errs[w] && err_idx[w] < best) {
      best = err_idx[w];
      first = errs[w];
    }
  }
  if (first) std::rethrow_exception(first);
}

inline unsigned default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace ltfbm
