#include "isostab/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace isostab::par {

int thread_cap() {
  static const int cap = [] {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    const char* env = std::getenv("ISO_STAB_THREADS");
    if (env == nullptr || *env == '\0') return hw;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || v < 0) return hw;
    if (v == 0) return hw;
    return static_cast<int>(v);
  }();
  return cap;
}

void for_chunks(std::int64_t n, std::int64_t chunk_size,
                const std::function<void(std::int64_t, std::int64_t,
                                         std::int64_t)>& fn) {
  if (n <= 0) return;
  if (chunk_size < 1) chunk_size = 1;
  const std::int64_t n_chunks = (n + chunk_size - 1) / chunk_size;
  auto run = [&](std::int64_t c) {
    const std::int64_t b = c * chunk_size;
    const std::int64_t e = std::min(n, b + chunk_size);
    fn(c, b, e);
  };

  const int workers =
      static_cast<int>(std::min<std::int64_t>(thread_cap(), n_chunks));
  if (workers <= 1) {
    for (std::int64_t c = 0; c < n_chunks; ++c) run(c);
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::int64_t c = next.fetch_add(1); c < n_chunks;
           c = next.fetch_add(1)) {
        run(c);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace isostab::par
