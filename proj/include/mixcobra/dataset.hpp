#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mixcobra/matrix.hpp"

namespace mixcobra {

enum class Task { regression, classification };

std::string to_string(Task task);
Task task_from_string(const std::string& name);

// Supervised sample: n feature rows with one target each. Regression targets
// live in [0, 1], classification targets are exactly 0 or 1.
struct Dataset {
    Matrix features;              // n x d
    std::vector<double> targets;  // n
    Task task = Task::regression;

    std::size_t n() const { return features.rows(); }
    std::size_t dim() const { return features.cols(); }

    std::span<const double> point(std::size_t i) const { return features.row(i); }

    // Throws std::invalid_argument when an invariant is violated.
    void validate() const;

    Dataset subset(std::span<const std::size_t> indices) const;
};

// Base-machine outputs over the rows of a dataset, one column per machine.
struct MachinePredictions {
    Matrix values;                           // n x p
    std::vector<std::string> machine_names;  // p

    std::size_t n() const { return values.rows(); }
    std::size_t machine_count() const { return values.cols(); }

    std::span<const double> row(std::size_t i) const { return values.row(i); }

    void validate(Task task) const;

    MachinePredictions subset(std::span<const std::size_t> indices) const;
};

double target_mean(const Dataset& data);

}  // namespace mixcobra
