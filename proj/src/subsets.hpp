#pragma once

#include <cstddef>
#include <vector>

#include "fairpath/graph.hpp"

namespace fairpath::detail {

// Calls fn on every size-k subset of pool in lexicographic order until fn returns true.
template <typename Fn>
bool for_each_subset(const std::vector<VariableId>& pool, std::size_t k, Fn&& fn) {
    if (k > pool.size()) return false;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    std::vector<VariableId> subset(k);
    while (true) {
        for (std::size_t i = 0; i < k; ++i) subset[i] = pool[idx[i]];
        if (fn(subset)) return true;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == pool.size() - k + i - 1) --i;
        if (i == 0) return false;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace fairpath::detail
