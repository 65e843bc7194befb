#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace mdpf {

/// Splits [0, n) into `workers` contiguous chunks and runs fn(begin, end, chunk)
/// on each, one thread per chunk. The chunk boundaries depend only on n and
/// workers. The first exception thrown by any chunk is rethrown.
template <class Fn>
void parallel_chunks(std::size_t n, int workers, Fn&& fn) {
  const std::size_t w = static_cast<std::size_t>(std::max(1, workers));
  if (w == 1 || n < 2 * w) {
    fn(std::size_t{0}, n, std::size_t{0});
    return;
  }
  std::vector<std::exception_ptr> errors(w);
  std::vector<std::thread> threads;
  threads.reserve(w);
  for (std::size_t c = 0; c < w; ++c) {
    const std::size_t begin = n * c / w;
    const std::size_t end = n * (c + 1) / w;
    threads.emplace_back([&, begin, end, c] {
      try {
        fn(begin, end, c);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace mdpf
