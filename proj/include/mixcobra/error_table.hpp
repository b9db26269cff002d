#pragma once

#include <string>
#include <vector>

#include "mixcobra/matrix.hpp"

namespace mixcobra {

// Per-row (machine or aggregator) test errors over K benchmark repetitions,
// with summary statistics and base-machine win counts. A tie for the best
// repetition error splits the win fractionally, so wins over base machines
// sum to exactly K.
struct ErrorTable {
    std::vector<std::string> names;
    std::vector<char> is_aggregator;  // parallel to names
    Matrix errors;                    // names.size() x repetitions
    std::vector<double> wins;         // zero for aggregator rows
    std::string label;                // e.g. "d=6" in dimension sweeps

    std::size_t row_count() const { return names.size(); }
    std::size_t repetitions() const { return errors.cols(); }

    double mean_error(std::size_t row) const;

    // Sample standard deviation (K - 1 denominator); zero for K = 1.
    double std_error(std::size_t row) const;
};

}  // namespace mixcobra
