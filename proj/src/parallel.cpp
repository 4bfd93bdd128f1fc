#include "docrep/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace docrep {

int thread_count() {
    if (const char* env = std::getenv("DOCREP_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::size_t num_chunks(std::size_t n, std::size_t chunk_size) {
    if (chunk_size == 0) chunk_size = 1;
    return (n + chunk_size - 1) / chunk_size;
}

namespace {

void run_pool(std::size_t n_items, const std::function<void(std::size_t)>& fn) {
    if (n_items == 0) return;
    int workers = std::min<std::size_t>(thread_count(), n_items);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n_items; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n_items) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

void parallel_for_index(std::size_t n, const std::function<void(std::size_t)>& fn) {
    run_pool(n, fn);
}

void parallel_chunks(std::size_t n, std::size_t chunk_size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (chunk_size == 0) chunk_size = 1;
    std::size_t chunks = num_chunks(n, chunk_size);
    run_pool(chunks, [&](std::size_t c) {
        std::size_t begin = c * chunk_size;
        std::size_t end = std::min(n, begin + chunk_size);
        fn(c, begin, end);
    });
}

}  // namespace docrep
