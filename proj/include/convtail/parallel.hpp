#ifndef CONVTAIL_PARALLEL_HPP
#define CONVTAIL_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace convtail {

/// Worker count from CONVTAIL_THREADS (0 or unset = hardware concurrency).
inline unsigned worker_count() {
  unsigned n = 0;
  if (const char* env = std::getenv("CONVTAIL_THREADS"); env != nullptr && *env != '\0') {
    try {
      n = static_cast<unsigned>(std::stoul(env));
    } catch (...) {
      n = 0;
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

/// Runs `body(begin, end)` over [0, count) in chunks of `chunk`, handing
/// chunks out dynamically. Each index is processed by exactly one call, so
/// results cannot depend on the number of workers as long as `body` only
/// writes to the indices it was given.
template <class Body>
void parallel_chunks(std::size_t count, std::size_t chunk, Body&& body) {
  const std::size_t chunks = (count + chunk - 1) / chunk;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c * chunk, std::min(count, (c + 1) * chunk));
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
      body(c * chunk, std::min(count, (c + 1) * chunk));
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
}

}  // namespace convtail

#endif  // CONVTAIL_PARALLEL_HPP
