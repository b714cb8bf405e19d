#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fairpath/rng.hpp"

namespace fairpath {

struct Summary {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation (n - 1)
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t count = 0;
};

/// Mean, sample SD and a percentile interval (linear interpolation between order statistics).
Summary summarize(std::vector<double> values, double level = 0.95);

/// Seed of bootstrap replicate `b` under `seed`.
inline std::uint64_t replicate_seed(std::uint64_t seed, std::size_t b) {
    return derive_seed(seed, static_cast<std::uint64_t>(b) + 1);
}

/// Worker threads used for replicate loops: $FAIRPATH_THREADS if set, else the
/// hardware concurrency.
unsigned worker_count();

/// Runs fn(b) for b in [0, count) on worker threads. Results are stored by
/// index, so the output does not depend on scheduling. fn returns nullopt (or
/// throws) for a failed replicate.
template <typename T>
std::vector<std::optional<T>> run_replicates(std::size_t count, const std::function<std::optional<T>(std::size_t)>& fn) {
    std::vector<std::optional<T>> results(count);
    const auto workers = std::max<std::size_t>(1, std::min<std::size_t>(worker_count(), count));
    auto body = [&](std::size_t worker) {
        for (std::size_t b = worker; b < count; b += workers) {
            try {
                results[b] = fn(b);
            } catch (const std::exception&) {
                results[b] = std::nullopt;
            }
        }
    };
    if (workers == 1) {
        body(0);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body, w);
    }
    return results;
}

/// Throws std::runtime_error when more than 20% of replicates failed.
void check_failure_rate(std::size_t failed, std::size_t total, const std::string& what);

}  // namespace fairpath
