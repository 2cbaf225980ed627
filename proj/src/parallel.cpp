#include "rayorder/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace rayorder {

namespace {
std::atomic<unsigned> g_workers{0};
}

void set_worker_threads(unsigned n) { g_workers.store(n); }

unsigned worker_threads() {
    unsigned n = g_workers.load();
    if (n == 0) {
        n = std::thread::hardware_concurrency();
        if (n == 0) n = 1;
    }
    return n;
}

void parallel_for_chunks(size_t n, const std::function<void(size_t, size_t)>& fn) {
    if (n == 0) return;
    unsigned workers = worker_threads();
    if (workers <= 1 || n < 2) {
        fn(0, n);
        return;
    }
    size_t chunks = std::min<size_t>(workers, n);
    size_t per = (n + chunks - 1) / chunks;
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    for (size_t c = 0; c < chunks; ++c) {
        size_t begin = c * per;
        size_t end = std::min(n, begin + per);
        if (begin >= end) break;
        pool.emplace_back(fn, begin, end);
    }
    for (std::thread& t : pool) t.join();
}

} // namespace rayorder
