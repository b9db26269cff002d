#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mixcobra/dataset.hpp"

namespace mixcobra {

// Base-machine recipe. Factories fill in the defaults used by the benchmark
// harness; names follow the usual shorthand (lm, cart, bag, knn5, ...).
struct MachineSpec {
    enum class Kind { knn, linear, logistic, lda, tree, bagged_trees, noise };

    Kind kind = Kind::knn;
    int k = 5;             // knn
    int max_depth = -1;    // tree / bagged members, -1 = unbounded
    int min_leaf = 1;      // tree
    int n_trees = 50;      // bagged_trees
    bool bootstrap = true; // bagged_trees

    static MachineSpec knn(int k);
    static MachineSpec linear();
    static MachineSpec logistic();
    static MachineSpec lda();
    static MachineSpec tree(int max_depth = -1, int min_leaf = 5);
    static MachineSpec bagged_trees(int n_trees = 50, int max_depth = -1, bool bootstrap = true);
    static MachineSpec noise();

    // Parses tokens such as "knn5", "lm", "logit", "lda", "cart", "bag", "noise".
    static MachineSpec from_token(const std::string& token);

    std::string default_name() const;
};

// Immutable fitted machine. predict is deterministic given the fitted state;
// classification machines return labels in {0, 1} as doubles.
class FittedMachine {
public:
    virtual ~FittedMachine() = default;

    virtual double predict(std::span<const double> x) const = 0;

    Task task() const { return task_; }
    std::size_t input_dim() const { return input_dim_; }
    const std::string& name() const { return name_; }

protected:
    FittedMachine(Task task, std::size_t input_dim, std::string name)
        : task_(task), input_dim_(input_dim), name_(std::move(name)) {}

    void check_query(std::span<const double> x) const;

private:
    Task task_;
    std::size_t input_dim_;
    std::string name_;
};

std::unique_ptr<FittedMachine> fit(const MachineSpec& spec, const Dataset& train,
                                   std::uint64_t seed);

// Column m holds machine m's predictions over all rows of data.
MachinePredictions predict_matrix(const std::vector<std::unique_ptr<FittedMachine>>& machines,
                                  const Dataset& data);

}  // namespace mixcobra
