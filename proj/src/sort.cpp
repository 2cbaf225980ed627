#include "rayorder/sort.hpp"

#include <array>
#include <chrono>
#include <numeric>

#include "rayorder/parallel.hpp"

namespace rayorder {

namespace {

constexpr uint32_t kRadix = 256;

void radix_pass(std::span<const KeyIndexPair> src, std::span<KeyIndexPair> dst, uint32_t shift) {
    size_t n = src.size();
    unsigned workers = worker_threads();
    size_t chunks = workers <= 1 ? 1 : std::min<size_t>(workers, (n + 4095) / 4096);
    if (chunks == 0) chunks = 1;
    size_t per = (n + chunks - 1) / chunks;

    std::vector<std::array<uint32_t, kRadix>> hist(chunks);
    parallel_for_chunks(chunks, [&](size_t cb, size_t ce) {
        for (size_t c = cb; c < ce; ++c) {
            hist[c].fill(0);
            size_t begin = c * per, end = std::min(n, begin + per);
            for (size_t i = begin; i < end; ++i)
                ++hist[c][(src[i].key >> shift) & 0xff];
        }
    });

    // Offsets follow digit-major, then chunk-major order: the output is the
    // stable order no matter how many chunks there are.
    uint32_t running = 0;
    std::vector<std::array<uint32_t, kRadix>> offset(chunks);
    for (uint32_t d = 0; d < kRadix; ++d)
        for (size_t c = 0; c < chunks; ++c) {
            offset[c][d] = running;
            running += hist[c][d];
        }

    parallel_for_chunks(chunks, [&](size_t cb, size_t ce) {
        for (size_t c = cb; c < ce; ++c) {
            size_t begin = c * per, end = std::min(n, begin + per);
            for (size_t i = begin; i < end; ++i)
                dst[offset[c][(src[i].key >> shift) & 0xff]++] = src[i];
        }
    });
}

} // namespace

void radix_sort_pairs(std::span<KeyIndexPair> pairs, KeyBits key_bits) {
    if (pairs.size() < 2) return;
    int passes = key_bits == KeyBits::k64 ? 8 : 4;
    std::vector<KeyIndexPair> buffer(pairs.size());
    std::span<KeyIndexPair> a = pairs, b = buffer;
    for (int p = 0; p < passes; ++p) {
        radix_pass(a, b, uint32_t(p) * 8);
        std::swap(a, b);
    }
    // Even pass count: data is back in `pairs`.
}

void segmented_sort_pairs(std::span<KeyIndexPair> pairs, uint32_t segment_size, KeyBits key_bits) {
    if (segment_size == 0 || segment_size >= pairs.size()) {
        radix_sort_pairs(pairs, key_bits);
        return;
    }
    size_t n_segments = (pairs.size() + segment_size - 1) / segment_size;
    for (size_t s = 0; s < n_segments; ++s) {
        size_t begin = s * size_t(segment_size);
        size_t end = std::min(pairs.size(), begin + segment_size);
        radix_sort_pairs(pairs.subspan(begin, end - begin), key_bits);
    }
}

ReorderReport reorder_pipeline(std::span<const Ray> rays, KeyMethod method, const KeyContext& ctx,
                               const SortPlan& plan, bool indirect) {
    plan.validate();
    using clock = std::chrono::steady_clock;
    auto ms = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
    };

    ReorderReport rep;
    if (method == KeyMethod::Unsorted) {
        rep.order.resize(rays.size());
        std::iota(rep.order.begin(), rep.order.end(), 0);
        if (!indirect) {
            rep.reordered.assign(rays.begin(), rays.end());
            rep.inverse = rep.order;
        }
        return rep;
    }

    KeyContext key_ctx = ctx;
    key_ctx.key_bits = plan.key_bits;

    std::vector<Vec3> terminations;
    if (method == KeyMethod::TwoPointReal) {
        if (ctx.estimator == nullptr || !ctx.estimator->traced())
            throw std::invalid_argument("reorder_pipeline: two_point_real needs a traced estimator");
        auto t0 = clock::now();
        terminations.resize(rays.size());
        parallel_for_chunks(rays.size(), [&](size_t begin, size_t end) {
            for (size_t i = begin; i < end; ++i)
                terminations[i] = ctx.estimator->termination(rays[i]);
        });
        rep.pretrace_ms = ms(t0, clock::now());
    }

    auto t0 = clock::now();
    KeyBatch kb = compute_keys(rays, method, key_ctx, terminations);
    auto t1 = clock::now();
    rep.code_ms = ms(t0, t1);

    std::vector<KeyIndexPair> pairs(rays.size());
    for (size_t i = 0; i < rays.size(); ++i) pairs[i] = {kb.keys[i], uint32_t(i)};
    segmented_sort_pairs(pairs, plan.segment_size, plan.key_bits);
    auto t2 = clock::now();
    rep.sort_ms = ms(t1, t2);

    rep.order.resize(rays.size());
    for (size_t i = 0; i < rays.size(); ++i) rep.order[i] = pairs[i].index;
    if (!indirect) {
        auto [reordered, inverse] = gather_reorder(rays, std::span<const uint32_t>(rep.order));
        rep.reordered = std::move(reordered);
        rep.inverse = std::move(inverse);
        rep.reorder_ms = ms(t2, clock::now());
    }
    return rep;
}

} // namespace rayorder
