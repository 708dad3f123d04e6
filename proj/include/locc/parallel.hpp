#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace locc {

/// Calls body(i) for i in [0, n) on up to `width` threads, splitting the range
/// into contiguous blocks. The first exception thrown by any block is
/// rethrown after all threads finish.
template <typename Body>
void parallel_for(std::size_t n, unsigned width, Body&& body) {
  width = std::max(1u, width);
  if (width == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t blocks = std::min<std::size_t>(width, n);
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> threads;
    threads.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::size_t lo = n * b / blocks, hi = n * (b + 1) / blocks;
      threads.emplace_back([&, lo, hi] {
        try {
          for (std::size_t i = lo; i < hi; ++i) body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace locc
