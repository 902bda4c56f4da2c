#pragma once

// Test-only reference implementations, deliberately independent of the
// library's weight machinery: recall is re-derived as plain integer
// overlap counting over the presented cells.

#include <cstddef>
#include <utility>
#include <vector>

#include "gmem/pattern.hpp"

namespace gmem::testing {

// Smallest index maximizing |{j : presented[j] && probe[j] && pattern[j]}|,
// plus that overlap count.
inline std::pair<std::size_t, std::size_t> brute_force_winner(
    const std::vector<gmem::BitPattern>& patterns, const gmem::MaskedPattern& probe) {
    std::size_t best_index = 0;
    std::size_t best_overlap = 0;
    bool first = true;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        std::size_t overlap = 0;
        for (std::size_t j = 0; j < probe.pattern.bits.size(); ++j) {
            if (probe.presented[j] && probe.pattern.bits[j] && patterns[i].bits[j])
                ++overlap;
        }
        if (first || overlap > best_overlap) {
            best_index = i;
            best_overlap = overlap;
            first = false;
        }
    }
    return {best_index, best_overlap};
}

}  // namespace gmem::testing
