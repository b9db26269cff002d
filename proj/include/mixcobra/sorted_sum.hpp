#pragma once

#include <algorithm>
#include <span>
#include <vector>

namespace mixcobra {

// Sum over an ascending-sorted copy. The result depends only on the multiset
// of terms, so reordering training rows cannot change any downstream value.
inline double sorted_sum(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double total = 0.0;
    for (double v : sorted) total += v;
    return total;
}

inline double sorted_sum(std::vector<double>&& values) {
    std::sort(values.begin(), values.end());
    double total = 0.0;
    for (double v : values) total += v;
    return total;
}

}  // namespace mixcobra
