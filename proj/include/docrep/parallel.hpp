#pragma once

#include <cstddef>
#include <functional>

namespace docrep {

// Worker count: DOCREP_THREADS env var if set (>=1), else hardware concurrency.
int thread_count();

// Runs fn(index) for index in [0,n) on the worker pool. Each index must write
// only to its own output slot; results are then deterministic regardless of
// the number of threads.
void parallel_for_index(std::size_t n, const std::function<void(std::size_t)>& fn);

// Runs fn(chunk, begin, end) over fixed-size chunks of [0,n). The chunk grid
// depends only on (n, chunk_size), so per-chunk partial results merged in
// chunk order reproduce bit-identically under any thread count.
void parallel_chunks(std::size_t n, std::size_t chunk_size,
                     const std::function<void(std::size_t chunk, std::size_t begin, std::size_t end)>& fn);

std::size_t num_chunks(std::size_t n, std::size_t chunk_size);

}  // namespace docrep
