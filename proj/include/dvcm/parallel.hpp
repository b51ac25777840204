#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace dvcm {

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Static block partition of [0, n) over `threads` workers. body(begin, end)
// runs on each block; blocks are contiguous so per-index output slots make
// results independent of the thread count. The first worker exception is
// rethrown on the caller.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  threads = resolve_threads(threads);
  if (n == 0) return;
  if (threads <= 1 || n == 1) {
    body(std::size_t{0}, n);
    return;
  }
  const std::size_t nblocks = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(nblocks);
  std::vector<std::exception_ptr> errors(nblocks);
  const std::size_t chunk = (n + nblocks - 1) / nblocks;
  for (std::size_t b = 0; b < nblocks; ++b) {
    const std::size_t lo = b * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi, b] {
      try {
        body(lo, hi);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace dvcm
