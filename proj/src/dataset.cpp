#include "mixcobra/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mixcobra/sorted_sum.hpp"

namespace mixcobra {

std::string to_string(Task task) {
    return task == Task::regression ? "regression" : "classification";
}

Task task_from_string(const std::string& name) {
    if (name == "regression") return Task::regression;
    if (name == "classification") return Task::classification;
    throw std::invalid_argument("unknown task '" + name + "'");
}

void Dataset::validate() const {
    if (n() == 0) throw std::invalid_argument("dataset is empty");
    if (dim() == 0) throw std::invalid_argument("dataset has no features");
    if (targets.size() != n())
        throw std::invalid_argument("target count " + std::to_string(targets.size()) +
                                    " does not match row count " + std::to_string(n()));
    for (double v : features.data())
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double y = targets[i];
        if (!std::isfinite(y)) throw std::invalid_argument("non-finite target at index " + std::to_string(i));
        if (task == Task::classification) {
            if (y != 0.0 && y != 1.0)
                throw std::invalid_argument("invalid label at index " + std::to_string(i) +
                                            " (labels must be 0 or 1)");
        } else if (y < 0.0 || y > 1.0) {
            throw std::invalid_argument("regression target out of [0,1] at index " + std::to_string(i));
        }
    }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.task = task;
    out.features = features.select_rows(indices);
    out.targets.reserve(indices.size());
    for (std::size_t idx : indices) out.targets.push_back(targets.at(idx));
    return out;
}

void MachinePredictions::validate(Task task) const {
    if (machine_count() == 0) throw std::invalid_argument("prediction matrix has no machines");
    if (machine_names.size() != machine_count())
        throw std::invalid_argument("machine name count does not match column count");
    for (double v : values.data()) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite prediction value");
        if (task == Task::classification && v != 0.0 && v != 1.0)
            throw std::invalid_argument("classification machine output must be 0 or 1");
    }
}

MachinePredictions MachinePredictions::subset(std::span<const std::size_t> indices) const {
    MachinePredictions out;
    out.machine_names = machine_names;
    out.values = values.select_rows(indices);
    return out;
}

double target_mean(const Dataset& data) {
    if (data.targets.empty()) throw std::invalid_argument("dataset is empty");
    return sorted_sum(data.targets) / static_cast<double>(data.targets.size());
}

}  // namespace mixcobra
