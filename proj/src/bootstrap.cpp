#include "fairpath/bootstrap.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace fairpath {

Summary summarize(std::vector<double> values, double level) {
    Summary s;
    s.count = values.size();
    if (values.empty()) return s;
    const double n = static_cast<double>(values.size());
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / (n - 1.0));
    }
    std::sort(values.begin(), values.end());
    auto quantile = [&](double p) {
        const double pos = p * (n - 1.0);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    s.ci_low = quantile((1.0 - level) / 2.0);
    s.ci_high = quantile(1.0 - (1.0 - level) / 2.0);
    return s;
}

unsigned worker_count() {
    if (const char* env = std::getenv("FAIRPATH_THREADS"); env && *env) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void check_failure_rate(std::size_t failed, std::size_t total, const std::string& what) {
    if (total > 0 && static_cast<double>(failed) > 0.2 * static_cast<double>(total))
        throw std::runtime_error(what + ": " + std::to_string(failed) + " of " + std::to_string(total) +
                                 " bootstrap replicates failed (more than 20%)");
}

}  // namespace fairpath
