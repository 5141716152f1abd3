#pragma once

#include <cstdint>
#include <functional>

namespace isostab::par {

/// Thread budget: ISO_STAB_THREADS env var caps parallelism, 0 or unset
/// means one thread per hardware core.  Always at least 1.
int thread_cap();

/// Runs fn(chunk_index, begin, end) over [0, n) split into fixed-size chunks.
/// Chunk boundaries depend only on n and chunk_size, never on the thread
/// budget, so per-chunk partial results reduce deterministically.
void for_chunks(std::int64_t n, std::int64_t chunk_size,
                const std::function<void(std::int64_t, std::int64_t,
                                         std::int64_t)>& fn);

}  // namespace isostab::par
