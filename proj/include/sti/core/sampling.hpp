#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "sti/core/estimate.hpp"
#include "sti/core/rng.hpp"

namespace sti {

// Batched sample driver. Samples are split into n_batches contiguous
// index ranges; every sample owns the generator stream(root, mix(op, i)),
// so results are bit-identical for any worker count: workers claim whole
// batches and rows are merged by batch index.
struct SamplePlan {
    std::uint64_t root_seed = 1;
    std::uint64_t op_id = 0;
    std::int64_t n_samples = 0;
    int n_batches = 64;
    int workers = 1;
};

inline int effective_batches(const SamplePlan& p) {
    auto nb = static_cast<std::int64_t>(p.n_batches);
    if (nb > p.n_samples) nb = p.n_samples > 0 ? p.n_samples : 1;
    return static_cast<int>(nb);
}

// fn(rng, out_row): accumulate one sample into out_row (width doubles)
inline BatchTable run_batched(const SamplePlan& plan, int width,
                              const std::function<void(Rng&, double*)>& fn) {
    const int nb = effective_batches(plan);
    BatchTable tab(width, nb);
    auto run_batch = [&](int b) {
        std::int64_t lo = plan.n_samples * b / nb;
        std::int64_t hi = plan.n_samples * (b + 1) / nb;
        std::vector<double> row(width, 0.0);
        std::vector<double> acc(width, 0.0);
        for (std::int64_t i = lo; i < hi; ++i) {
            Rng rng = Rng::stream(plan.root_seed, Rng::mix(plan.op_id, static_cast<std::uint64_t>(i)));
            for (auto& x : row) x = 0.0;
            fn(rng, row.data());
            for (int j = 0; j < width; ++j) acc[j] += row[j];
        }
        double* out = tab.batch_row(b);
        for (int j = 0; j < width; ++j) out[j] = acc[j];
        tab.add_count(b, hi - lo);
    };

    if (plan.workers <= 1) {
        for (int b = 0; b < nb; ++b) run_batch(b);
    } else {
        std::atomic<int> next{0};
        auto worker = [&]() {
            while (true) {
                int b = next.fetch_add(1);
                if (b >= nb) break;
                run_batch(b);
            }
        };
        std::vector<std::thread> pool;
        int nw = std::min(plan.workers, nb);
        pool.reserve(nw);
        for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return tab;
}

}  // namespace sti
