#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mixcobra/datagen.hpp"
#include "mixcobra/dataset.hpp"
#include "mixcobra/error_table.hpp"
#include "mixcobra/kernel.hpp"
#include "mixcobra/learners.hpp"
#include "mixcobra/tuning.hpp"

namespace mixcobra {

// Benchmark recipe: repeated random splits, per-machine test errors, and the
// configured aggregators tuned by cross-validation on each training part.
struct ExperimentConfig {
    Task task = Task::classification;

    // Exactly one data source: a generator or a dataset file.
    std::optional<GeneratorSpec> generator;
    std::string dataset_path;
    std::string predictions_path;  // optional external machine columns (file datasets only)

    std::vector<MachineSpec> machines;

    bool use_mixcobra = true;
    bool use_cobra_fixed = false;
    bool use_cobra_adaptive = false;

    std::size_t repetitions = 20;
    std::optional<double> train_fraction;        // default 0.75 / classification, 2/3 regression
    std::optional<bool> standardize_features;    // default: regression only
    Kernel kernel = Kernel::gaussian();
    int folds = 5;
    std::uint64_t seed = 0;
    bool parallel = false;

    // Empty grids fall back to the data-scaled defaults of the tuning module.
    std::vector<double> alpha_grid;
    std::vector<double> beta_grid;
    std::vector<double> delta_grid;
    std::vector<double> gamma_grid;

    std::vector<std::size_t> extra_dims;  // dimension-sweep levels
    std::string out_dir;

    double effective_train_fraction() const;
    bool effective_standardize() const;

    void validate() const;
};

// Test-and-export hooks; callbacks run under a lock and may arrive out of
// repetition order when the harness runs in parallel.
struct RepetitionObserver {
    std::function<void(std::size_t rep, const Dataset& tuning_train, const Dataset& test)> on_split;
    std::function<void(std::size_t rep, const MixCobraTuningResult&)> on_mixcobra_tuning;
    std::function<void(std::size_t rep, const std::string& aggregator, const CobraTuningResult&)>
        on_cobra_tuning;
};

// Runs the full protocol: per repetition, generate or split the data, fit
// the machines on the training part, tune aggregator parameters by CV on the
// training part only, and score everything on the test part. Deterministic
// given the master seed, with parallelism on or off.
ErrorTable run_experiment(const ExperimentConfig& config,
                          const RepetitionObserver* observer = nullptr);

// One full experiment per inflation level, sharing the master seed stream so
// each repetition sees the same base rows across levels. Tables are labeled
// "d=<total dimension>".
std::vector<ErrorTable> run_dimension_sweep(const ExperimentConfig& config,
                                            const std::vector<std::size_t>& extra_dims,
                                            const RepetitionObserver* observer = nullptr);

// Flat key-value config file (one `key = value` per line, '#' comments).
ExperimentConfig parse_config_file(const std::string& path);

// Plain-text summary table: one row per machine/aggregator with mean error,
// standard deviation, and win count.
std::string summary_text(const ErrorTable& table);

}  // namespace mixcobra
